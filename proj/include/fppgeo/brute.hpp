#pragma once

#include "fppgeo/lattice.hpp"
#include "fppgeo/percolation.hpp"

#include <cstdint>
#include <vector>

namespace fppgeo {

// Reference answers by exhaustive path enumeration, for tiny windows only
// (area <= 25, otherwise Error(Config)).

// Minimum over all simple 4-neighbour paths from source of the summed weights,
// indexed like the window. Sums accumulate from the source outwards.
std::vector<double> enumerate_passage_times(const PassageField& field, Site source);

// Longest oriented open path from every site, LevelTable::escapes when some
// such path touches the far boundary of the orientation.
std::vector<std::int32_t> enumerate_level_table(const PassageField& field, Orientation orientation);

} // namespace fppgeo
