// Copyright 2026 The Calum Authors.
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

// Small byte-level string helpers. All text is UTF-8; case folding and
// trimming touch ASCII bytes only, which leaves multi-byte sequences intact.

#ifndef CALUM_TEXT_H_
#define CALUM_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace calum {

std::string_view Trim(std::string_view s);
std::string AsciiLower(std::string_view s);

// Trimmed, ASCII-lowercased label.
std::string NormalizeLabel(std::string_view s);

bool IsValidUtf8(std::string_view s);

std::vector<std::string_view> SplitOn(std::string_view s, char sep);

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string_view> SplitWhitespace(std::string_view s);

bool StartsWith(std::string_view s, std::string_view prefix);

// Reads a whole file. Throws Error(kIo) when it cannot be opened.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

// Splits file contents into lines on '\n'. A final terminator does not
// produce a trailing empty line; a trailing '\r' on each line is dropped.
std::vector<std::string> SplitLines(std::string_view contents);

}  // namespace calum

#endif  // CALUM_TEXT_H_
