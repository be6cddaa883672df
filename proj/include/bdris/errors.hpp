// SPDX-License-Identifier: Apache-2.0
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

#include <stdexcept>
#include <string>

namespace bdris
{

// Bad shapes, bad modes, inconsistent partitions.
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A dimension/rank requirement needed for a unique estimate is violated.
class IdentifiabilityError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Zero matrix where a nonzero one is required, zero signal with finite SNR, ...
class DegenerateInputError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or an SVD that failed to converge.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace bdris
