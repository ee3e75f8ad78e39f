/*
   Copyright 2026 The Chainwatch Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace chainwatch {

//! Wire-level unsigned quantity (wei, gas price, block number). Values above 64 bits are routine for wei.
using Uint256 = boost::multiprecision::uint256_t;

//! Unbounded accumulator for sums of Uint256 values.
using BigUint = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kWeiPerGwei = 1'000'000'000ULL;
inline const BigUint kWeiPerEth = BigUint{1'000'000'000'000'000'000ULL};

class MalformedQuantity : public std::invalid_argument {
  public:
    explicit MalformedQuantity(const std::string& what) : std::invalid_argument(what) {}
};

//! Decodes an Ethereum hex quantity ("0x0", "0x1a", ...). Rejects a missing prefix, empty digits,
//! non-hex characters, leading zeros and values that do not fit 256 bits.
Uint256 decode_quantity(std::string_view hex);

//! Minimal lowercase hex encoding, the inverse of decode_quantity.
std::string encode_quantity(const Uint256& value);

//! decode_quantity narrowed to 64 bits; throws MalformedQuantity when the value is larger.
std::uint64_t decode_quantity_u64(std::string_view hex);

std::string to_decimal(const Uint256& value);
std::string to_decimal(const BigUint& value);

//! Parses a non-empty string of decimal digits; throws MalformedQuantity otherwise.
Uint256 parse_decimal_u256(std::string_view digits);
BigUint parse_decimal_big(std::string_view digits);

//! numerator / denominator rendered with `decimals` places, rounded half-up. Exact.
std::string format_ratio(const BigUint& numerator, const BigUint& denominator, unsigned decimals);

//! Fixed-point rendering of value / 10^scale_digits rounded half-up to `decimals` places.
//! Exact: no floating point is involved.
std::string format_scaled(const BigUint& value, unsigned scale_digits, unsigned decimals);

inline std::string format_eth(const BigUint& wei) { return format_scaled(wei, 18, 9); }
inline std::string format_gwei(const BigUint& wei) { return format_scaled(wei, 9, 9); }

//! Correctly rounded numerator / denominator as a double.
double ratio_to_double(const BigUint& numerator, const BigUint& denominator);

}  // namespace chainwatch
