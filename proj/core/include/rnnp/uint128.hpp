#pragma once

#include <string>

namespace rnnp {

using uint128 = unsigned __int128;

/// Decimal representation.
std::string to_string(uint128 value);

/// Overflow-checked arithmetic; throws NumericError naming `what`.
uint128 checked_add(uint128 a, uint128 b, const char* what);
uint128 checked_mul(uint128 a, uint128 b, const char* what);

}  // namespace rnnp
