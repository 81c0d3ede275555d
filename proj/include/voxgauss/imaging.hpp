// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <voxgauss/error.hpp>
#include <voxgauss/math.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace voxgauss {

using Rgb = Vec3f;

struct ControlPoint {
    double v;
    Rgb color;
};

/// Piecewise-linear map from visibility in [0, 1] to color.
struct TransferFunction {
    std::string name;
    std::vector<ControlPoint> points;
    /// Blend toward the background by (1 - visibility) instead of replacing it.
    bool blend_background = false;

    /// Throws InvalidArgument unless v starts at 0, ends at 1 and strictly increases.
    void validate() const;
};

/// Black to white.
TransferFunction tf_gray();
/// 0:(0,0,.5) .125:(0,0,1) .375:(0,1,1) .625:(1,1,0) .875:(1,0,0) 1:(.5,0,0)
TransferFunction tf_jet();
/// 0:(0,0,.1) .5:(.2,.4,1) 1:(1,1,1)
TransferFunction tf_bluewhite();
/// "gray" (or "grayscale"), "jet", "bluewhite". Throws InvalidArgument.
TransferFunction tf_by_name(const std::string& name);

/// Clamps v to [0, 1] and interpolates between the bracketing points.
Rgb tf_eval(const TransferFunction& tf, double v);

/// Visibility 1 - exp(-T) mapped through `tf` when something was hit, else `bg`.
Rgb shade(double T, bool hit_any, const TransferFunction& tf, const Rgb& bg);

/// Parses "r,g,b" with components in [0, 1].
Rgb parse_rgb(const std::string& text);

/// Floating-point accumulation buffer, three floats per pixel, rows top to bottom.
struct Film {
    int width = 0;
    int height = 0;
    std::vector<float> accum;
    int subframes = 0;

    Film() = default;
    /// Throws BadDims for non-positive sizes.
    Film(int w, int h);
    size_t pixel_count() const { return size_t(width) * size_t(height); }
    void clear();
};

/// accum += buffer, subframes += 1. Throws DimMismatch.
void accumulate(Film& film, const std::vector<float>& buffer);

struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;

    bool operator==(const Image8&) const = default;
};

/// floor(clamp(accum / max(subframes, 1), 0, 1) * 255 + 0.5) per channel.
Image8 tonemap_8bit(const Film& film);

/// 8-bit PSNR over all channels; +inf for identical images. Throws DimMismatch.
double psnr(const Image8& a, const Image8& b);

/// Binary P6 with maxval 255. Throws BadDims for empty images, IoFailure on stream errors.
void write_ppm(const Image8& img, std::ostream& sink);
std::string encode_ppm(const Image8& img);
Image8 read_ppm(std::istream& source);
Image8 decode_ppm(const std::string& bytes);
void write_ppm_file(const Image8& img, const std::string& path);
Image8 read_ppm_file(const std::string& path);

} // namespace voxgauss
