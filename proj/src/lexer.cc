// Copyright 2026 The mpst Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexer.h"

#include <cctype>

#include "mpst/errors.h"

namespace mpst::internal {

namespace {

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '\'';
}

}  // namespace

std::vector<Token> Lex(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token token{Tok::kEof, "", line, column};
    if (IsIdentStart(c)) {
      size_t j = i;
      while (j < text.size() && IsIdentChar(text[j])) ++j;
      token.kind = Tok::kIdent;
      token.text = std::string(text.substr(i, j - i));
      advance(j - i);
      tokens.push_back(std::move(token));
      continue;
    }
    struct Fixed {
      const char* spelling;
      Tok kind;
    };
    static constexpr Fixed kFixed[] = {
        {"(+)", Tok::kOplus}, {"->", Tok::kArrow},   {";", Tok::kSemi},
        {"&", Tok::kAmp},     {"|", Tok::kBar},      {"*", Tok::kStar},
        {"?", Tok::kQuestion}, {"(", Tok::kLParen},  {")", Tok::kRParen},
        {"{", Tok::kLBrace},  {"}", Tok::kRBrace},   {",", Tok::kComma},
        {":", Tok::kColon},   {"!", Tok::kBang},     {".", Tok::kDot},
        {"+", Tok::kPlus},
    };
    bool matched = false;
    for (const Fixed& f : kFixed) {
      std::string_view s(f.spelling);
      if (text.substr(i, s.size()) == s) {
        token.kind = f.kind;
        token.text = std::string(s);
        advance(s.size());
        tokens.push_back(std::move(token));
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw SyntaxError(std::string("unexpected character '") + c + "'", line,
                        column);
    }
  }
  tokens.push_back(Token{Tok::kEof, "", line, column});
  return tokens;
}

std::string Describe(const Token& token) {
  if (token.kind == Tok::kEof) return "end of input";
  return "'" + token.text + "'";
}

}  // namespace mpst::internal
