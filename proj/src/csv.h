// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIVREC_SRC_CSV_H_
#define DIVREC_SRC_CSV_H_

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "divrec/types.h"

namespace divrec::csv {

// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> SplitRecord(std::string_view line);

// Quotes `field` if it contains a comma, quote or newline.
std::string Escape(std::string_view field);

long long ParseInt(std::string_view text, long line);
double ParseDouble(std::string_view text, long line);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

// Reads the header line and checks it against `expected` (a trailing CR and
// a UTF-8 BOM are tolerated).
void ExpectHeader(std::istream& in, std::string_view expected,
                  const std::string& file);

// getline that strips a trailing '\r'.
bool ReadLine(std::istream& in, std::string& line);

}  // namespace divrec::csv

#endif  // DIVREC_SRC_CSV_H_
