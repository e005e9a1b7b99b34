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

// RFC 4180 CSV with '\n' record terminators.

#ifndef CALUM_CSV_H_
#define CALUM_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace calum::csv {

using Row = std::vector<std::string>;

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string QuoteField(std::string_view field);

std::string FormatRow(const Row& row);

// Parses a whole document. Accepts '\n' or "\r\n" terminators.
// Throws Error(kMalformedRow) on an unterminated quoted field or stray quote.
std::vector<Row> Parse(std::string_view text);

}  // namespace calum::csv

#endif  // CALUM_CSV_H_
