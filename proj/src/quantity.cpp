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

#include <chainwatch/quantity.hpp>

#include <algorithm>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace chainwatch {

namespace {

    int hex_digit(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    template <typename Int>
    Int parse_decimal(std::string_view digits, std::size_t max_digits) {
        if (digits.empty()) throw MalformedQuantity("empty decimal string");
        if (digits.size() > max_digits) throw MalformedQuantity("decimal value too large: " + std::string{digits});
        Int value = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') throw MalformedQuantity("invalid decimal digit in " + std::string{digits});
            value = value * 10 + (c - '0');
        }
        return value;
    }

}  // namespace

Uint256 decode_quantity(std::string_view hex) {
    if (hex.size() < 2 || hex[0] != '0' || hex[1] != 'x') {
        throw MalformedQuantity("quantity is missing 0x prefix: " + std::string{hex});
    }
    const auto digits = hex.substr(2);
    if (digits.empty()) throw MalformedQuantity("quantity has no digits");
    if (digits.size() > 1 && digits[0] == '0') throw MalformedQuantity("quantity has leading zeros: " + std::string{hex});
    if (digits.size() > 64) throw MalformedQuantity("quantity exceeds 256 bits: " + std::string{hex});

    Uint256 value = 0;
    for (char c : digits) {
        const int d = hex_digit(c);
        if (d < 0) throw MalformedQuantity("invalid hex digit in quantity: " + std::string{hex});
        value = (value << 4) | Uint256{static_cast<unsigned>(d)};
    }
    return value;
}

std::string encode_quantity(const Uint256& value) {
    if (value == 0) return "0x0";
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    Uint256 v = value;
    while (v != 0) {
        out.push_back(kDigits[static_cast<unsigned>(v & 0xf)]);
        v >>= 4;
    }
    out += "x0";
    std::reverse(out.begin(), out.end());
    return out;
}

std::uint64_t decode_quantity_u64(std::string_view hex) {
    const Uint256 v = decode_quantity(hex);
    if (v > std::numeric_limits<std::uint64_t>::max()) {
        throw MalformedQuantity("quantity exceeds 64 bits: " + std::string{hex});
    }
    return static_cast<std::uint64_t>(v);
}

std::string to_decimal(const Uint256& value) { return value.str(); }
std::string to_decimal(const BigUint& value) { return value.str(); }

Uint256 parse_decimal_u256(std::string_view digits) {
    // 2^256 has 78 decimal digits; a 78-digit string can still overflow, so range-check via BigUint.
    const BigUint big = parse_decimal<BigUint>(digits, 78);
    if (big > BigUint{std::numeric_limits<Uint256>::max()}) {
        throw MalformedQuantity("decimal value exceeds 256 bits: " + std::string{digits});
    }
    return static_cast<Uint256>(big);
}

BigUint parse_decimal_big(std::string_view digits) {
    return parse_decimal<BigUint>(digits, std::numeric_limits<std::size_t>::max());
}

std::string format_ratio(const BigUint& numerator, const BigUint& denominator, unsigned decimals) {
    if (denominator == 0) throw std::domain_error("division by zero");
    BigUint out_scale = 1;
    for (unsigned i = 0; i < decimals; ++i) out_scale *= 10;

    // units of 10^-decimals, rounded half-up
    const BigUint scaled = (numerator * out_scale * 2 + denominator) / (denominator * 2);
    const BigUint whole = scaled / out_scale;
    if (decimals == 0) return whole.str();
    std::string frac = BigUint{scaled % out_scale}.str();
    frac.insert(0, decimals - frac.size(), '0');
    return whole.str() + "." + frac;
}

std::string format_scaled(const BigUint& value, unsigned scale_digits, unsigned decimals) {
    BigUint scale = 1;
    for (unsigned i = 0; i < scale_digits; ++i) scale *= 10;
    return format_ratio(value, scale, decimals);
}

double ratio_to_double(const BigUint& numerator, const BigUint& denominator) {
    if (denominator == 0) throw std::domain_error("division by zero");
    // 256-bit mantissa: the quotient carries far more precision than the final double.
    using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;
    const Wide q = Wide{numerator} / Wide{denominator};
    return q.convert_to<double>();
}

}  // namespace chainwatch
