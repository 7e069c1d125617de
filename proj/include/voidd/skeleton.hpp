#pragma once

#include "voidd/geometry.hpp"
#include "voidd/image.hpp"

namespace voidd {

/// True when removing the centre of the 3x3 configuration keeps the
/// topology (8-connected foreground, 4-connected background). Bit k of
/// `neighbors` is set when neighbor k is foreground, neighbors ordered
/// E, NE, N, NW, W, SW, S, SE.
bool is_simple_configuration(unsigned neighbors);

/// Neighborhood code of pixel (x, y) in the ordering used above.
unsigned neighborhood_code(const BinaryMask& mask, int x, int y);

/// Topology-preserving thinning: simple, non-end foreground pixels are
/// removed in directional raster passes (N, S, E, W) until a full cycle
/// changes nothing. The result is a subset of the input with the same number
/// of components and holes.
BinaryMask thin(const BinaryMask& mask);

/// Longest shortest-path (arc-length diameter) through the skeleton's pixel
/// graph after pruning spurs shorter than 3 pixels. The first point is the
/// endpoint with smaller (y, x). Throws degenerate-skeleton when the skeleton
/// has no endpoint (closed loop) or a single pixel.
Polyline skeleton_to_curve(const BinaryMask& skel);

}  // namespace voidd
