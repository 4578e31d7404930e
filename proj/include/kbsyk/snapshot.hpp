#pragma once

#include <iosfwd>
#include <string>

#include "kbsyk/contour_green.hpp"

namespace kbsyk {

inline constexpr char kSnapshotMagic[] = "KBSYK1";

// Binary layout: 6 magic bytes, then delta_t and lambda_t as little-endian
// doubles and n_points as a little-endian int64, then g_greater row-major with
// interleaved (re, im) doubles.
void write_snapshot(const ContourGreen& g, const std::string& path);
void write_snapshot(const CMatrix& g, const TimeLattice& lattice, const std::string& path);
ContourGreen read_snapshot(const std::string& path);

// Rows of t1,t2,re,im with 17 significant digits. stride subsamples both axes.
void write_csv(const CMatrix& g, const TimeLattice& lattice, std::ostream& out, int stride = 1);
void write_csv(const ContourGreen& g, const std::string& path, int stride = 1);

std::string format_double(double x);

}  // namespace kbsyk
