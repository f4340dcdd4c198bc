// SPDX-License-Identifier: Apache-2.0
//
// fdamimo - FDA-MIMO radar multipath identification and mitigation toolkit
// Copyright (C) 2026 The fdamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "fdamimo/types.hpp"
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <string>

namespace fdamimo::detail
{
    // Minimal CSV sink: header row, '.' decimal, 12 significant digits
    class CsvWriter
    {
    public:
        CsvWriter(const std::string &path, std::initializer_list<const char *> header) : out_(path)
        {
            if (!out_)
                throw ConfigError("cannot open " + path + " for writing");
            out_.imbue(std::locale::classic());
            out_ << std::setprecision(12);
            bool first = true;
            for (const char *h : header)
            {
                out_ << (first ? "" : ",") << h;
                first = false;
            }
            out_ << '\n';
        }

        template <typename T, typename... Rest>
        void row(const T &v, const Rest &...rest)
        {
            out_ << v;
            ((out_ << ',' << rest), ...);
            out_ << '\n';
        }

    private:
        std::ofstream out_;
    };
}
