/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_LUT_IO_HPP
#define XBAR_LUT_IO_HPP

#include <filesystem>
#include <vector>

#include "xbar/lookup_table.hpp"

namespace xbar {

/// Plain-text, line-oriented table container. Per table:
///   LUT v1 <direction> <n_g> <n_q>
///   <g_grid, space separated>
///   <q_grid>
///   n_g lines of n_q increments
/// Values are written with 17 significant digits and round-trip exactly.
/// A file may concatenate any number of tables; an empty list is a valid
/// (empty) file.
void save_tables(const std::vector<LookupTable> &tables, const std::filesystem::path &path);

/// Loads and validates every table in the file. Throws ParseError on
/// malformed input and ConfigError (with coordinates) on invariant
/// violations.
std::vector<LookupTable> load_tables(const std::filesystem::path &path);

} // namespace xbar

#endif // XBAR_LUT_IO_HPP
