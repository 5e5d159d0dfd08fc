// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_HASH_HPP
#define SUBWAVE_HASH_HPP

#include <string>
#include <string_view>

namespace subwave
{

// Lower-case hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);
std::string Sha256FileHex(const std::string &path);

}  // namespace subwave

#endif  // SUBWAVE_HASH_HPP
