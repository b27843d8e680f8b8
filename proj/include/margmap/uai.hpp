#pragma once

// Reader and writer for the UAI model format and its companion evidence
// format.
//
// Model grammar (whitespace of any kind separates tokens):
//
//   MARKOV | BAYES
//   n
//   card_0 ... card_{n-1}
//   f
//   f scope lines:   size v_1 ... v_size
//   f table blocks:  count x_1 ... x_count
//
// Lines starting with 'c' before the kind keyword are comments.
// Evidence grammar: count, then `count` pairs of (variable, state).

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/model.hpp"
#include "margmap/potential.hpp"

namespace margmap {

namespace detail {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t index;  // 1-based position among all tokens
};

class TokenStream {
 public:
  TokenStream(std::string_view text, bool skip_leading_comments) {
    std::size_t line_no = 0;
    bool body_started = !skip_leading_comments;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t eol = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, eol - pos);
      ++line_no;
      pos = eol + 1;

      const auto first = line.find_first_not_of(" \t\r\f\v");
      if (first == std::string_view::npos) continue;
      if (!body_started && line[first] == 'c') continue;
      body_started = true;

      std::size_t i = first;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) {
          tokens_.push_back(
              {std::string(line.substr(i, j - i)), line_no, tokens_.size() + 1});
        }
        i = j;
      }
    }
  }

  bool done() const { return next_ == tokens_.size(); }

  const Token& take(const char* expected) {
    if (done()) {
      const std::size_t line = tokens_.empty() ? 1 : tokens_.back().line;
      throw ParseError(std::string("unexpected end of input, expected ") +
                           expected,
                       line, tokens_.size() + 1);
    }
    return tokens_[next_++];
  }

  std::size_t take_count(const char* expected) {
    const Token& t = take(expected);
    std::size_t value = 0;
    const char* end = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw ParseError("expected " + std::string(expected) + ", got '" +
                           t.text + "'",
                       t.line, t.index);
    }
    return value;
  }

  double take_real(const char* expected) {
    const Token& t = take(expected);
    double value = 0.0;
    const char* end = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(t.text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw ParseError("expected " + std::string(expected) + ", got '" +
                           t.text + "'",
                       t.line, t.index);
    }
    if (value < 0.0) {
      throw ParseError("negative table value " + t.text, t.line, t.index);
    }
    return value;
  }

  void expect_end() const {
    if (!done()) {
      const Token& t = tokens_[next_];
      throw ParseError("unexpected trailing token '" + t.text + "'", t.line,
                       t.index);
    }
  }

  const Token& peek_last() const { return tokens_[next_ - 1]; }

 private:
  std::vector<Token> tokens_;
  std::size_t next_ = 0;
};

inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline GraphicalModel parse_uai(std::string_view text) {
  detail::TokenStream in(text, /*skip_leading_comments=*/true);

  const detail::Token& kind_token = in.take("network kind");
  NetworkKind kind;
  if (kind_token.text == "MARKOV") {
    kind = NetworkKind::kMarkov;
  } else if (kind_token.text == "BAYES") {
    kind = NetworkKind::kBayes;
  } else {
    throw ParseError("unknown network kind '" + kind_token.text + "'",
                     kind_token.line, kind_token.index);
  }

  const std::size_t n = in.take_count("variable count");
  std::vector<std::size_t> cards(n);
  for (auto& c : cards) {
    c = in.take_count("cardinality");
    if (c == 0) {
      const auto& t = in.peek_last();
      throw ParseError("cardinality must be positive", t.line, t.index);
    }
  }

  const std::size_t f = in.take_count("potential count");
  std::vector<std::vector<VariableId>> scopes(f);
  for (auto& scope : scopes) {
    scope.resize(in.take_count("scope size"));
    for (auto& v : scope) {
      v = in.take_count("variable index");
      const auto& t = in.peek_last();
      if (v >= n) throw ParseError("variable index out of range", t.line, t.index);
      for (const VariableId* w = scope.data(); w != &v; ++w) {
        if (*w == v) throw ParseError("duplicate variable in scope", t.line, t.index);
      }
    }
  }

  std::vector<Potential> potentials;
  potentials.reserve(f);
  for (auto& scope : scopes) {
    std::size_t expected = 1;
    for (VariableId v : scope) expected *= cards[v];
    const std::size_t count = in.take_count("table entry count");
    if (count != expected) {
      const auto& t = in.peek_last();
      throw ParseError("table declares " + std::to_string(count) +
                           " entries, scope requires " + std::to_string(expected),
                       t.line, t.index);
    }
    std::vector<double> table(count);
    for (auto& x : table) x = in.take_real("table value");
    potentials.push_back(Potential::over(std::move(scope), cards, std::move(table)));
  }
  in.expect_end();

  try {
    return GraphicalModel(std::move(cards), std::move(potentials), kind);
  } catch (const ModelError& err) {
    throw ParseError(err.what(), 1, 1);
  }
}

inline std::string write_uai(const GraphicalModel& m) {
  std::string out = m.kind() == NetworkKind::kBayes ? "BAYES\n" : "MARKOV\n";
  out += std::to_string(m.num_variables()) + "\n";
  for (std::size_t i = 0; i < m.num_variables(); ++i) {
    if (i) out += ' ';
    out += std::to_string(m.cardinality(i));
  }
  out += "\n" + std::to_string(m.num_potentials()) + "\n";
  for (const Potential& p : m.potentials()) {
    out += std::to_string(p.scope().size());
    for (VariableId v : p.scope()) out += " " + std::to_string(v);
    out += '\n';
  }
  for (const Potential& p : m.potentials()) {
    out += "\n" + std::to_string(p.size()) + "\n";
    for (double x : p.table()) out += " " + detail::format_real(x);
    out += '\n';
  }
  return out;
}

inline Evidence parse_evid(std::string_view text) {
  detail::TokenStream in(text, /*skip_leading_comments=*/false);
  const std::size_t count = in.take_count("evidence count");
  Evidence e;
  for (std::size_t i = 0; i < count; ++i) {
    const VariableId v = in.take_count("variable index");
    const State s = in.take_count("state index");
    if (e.contains(v)) {
      const auto& t = in.peek_last();
      throw ParseError("variable observed twice", t.line, t.index);
    }
    e.assign(v, s);
  }
  in.expect_end();
  return e;
}

inline std::string write_evid(const Evidence& e) {
  std::string out = std::to_string(e.size());
  for (const auto& [v, s] : e) {
    out += " " + std::to_string(v) + " " + std::to_string(s);
  }
  return out + "\n";
}

inline GraphicalModel load_uai(const std::string& path) {
  return parse_uai(detail::read_file(path));
}

inline Evidence load_evid(const std::string& path) {
  return parse_evid(detail::read_file(path));
}

}  // namespace margmap
