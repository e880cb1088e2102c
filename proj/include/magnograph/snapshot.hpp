#pragma once

#include <map>
#include <string>
#include <string_view>

#include "magnograph/field.hpp"
#include "magnograph/grid.hpp"
#include "magnograph/potential.hpp"

namespace magnograph {

/// Header of a field snapshot.
struct SnapshotHeader {
  std::string grid_hash;
  double mu = 0.0;
  double p = 0.0;
  double lambda = 0.0;
};

/// Field snapshot text:
///
///     grid_hash <hex>
///     mu <value>
///     p <value>
///     lambda <value>
///     edge <id> n <count>
///     <x> <re> <im>      (count lines)
///     ...
///
/// Numbers are written with 17 significant digits.
std::string write_field_snapshot(const GraphFunction& u, const GraphGrid& grid, const SnapshotHeader& header);

struct FieldSnapshot {
  SnapshotHeader header;
  GraphFunction u;
};

/// Reads a snapshot against a grid; throws ParseError on malformed text and
/// ValidationError when the layout does not match the grid.
FieldSnapshot read_field_snapshot(std::string_view text, const GraphGrid& grid);

/// Potential file: `edge <id> n <count>` blocks of `<x> <value> [<ignored>]`.
std::map<std::string, SampledProfile> read_potential_file(std::string_view text);
std::string write_potential_file(const std::map<std::string, SampledProfile>& profiles);

}  // namespace magnograph
