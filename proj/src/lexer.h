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

#ifndef MPST_SRC_LEXER_H_
#define MPST_SRC_LEXER_H_

#include <string>
#include <string_view>
#include <vector>

namespace mpst::internal {

enum class Tok {
  kIdent,
  kArrow,     // ->
  kSemi,      // ;
  kAmp,       // &
  kBar,       // |
  kStar,      // *
  kQuestion,  // ?
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kComma,
  kColon,
  kBang,   // !
  kDot,    // .
  kOplus,  // (+)
  kPlus,   // +
  kEof,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

// Splits `text` into tokens; `//` starts a comment running to the end of
// the line. Throws SyntaxError on an unexpected character.
std::vector<Token> Lex(std::string_view text);

std::string Describe(const Token& token);

}  // namespace mpst::internal

#endif  // MPST_SRC_LEXER_H_
