// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include <voxgauss/imaging.hpp>
#include <voxgauss/kernels.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace voxgauss {

void TransferFunction::validate() const {
    if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "transfer function needs two or more points");
    if (points.front().v != 0.0 || points.back().v != 1.0)
        throw Error(ErrorCode::InvalidArgument, "transfer function must span [0, 1]");
    for (size_t i = 1; i < points.size(); ++i)
        if (!(points[i].v > points[i - 1].v))
            throw Error(ErrorCode::InvalidArgument, "transfer function points must strictly increase");
}

TransferFunction tf_gray() { return {"gray", {{0.0, {0, 0, 0}}, {1.0, {1, 1, 1}}}, false}; }

TransferFunction tf_jet() {
    return {"jet",
            {{0.0, {0.0f, 0.0f, 0.5f}},
             {0.125, {0.0f, 0.0f, 1.0f}},
             {0.375, {0.0f, 1.0f, 1.0f}},
             {0.625, {1.0f, 1.0f, 0.0f}},
             {0.875, {1.0f, 0.0f, 0.0f}},
             {1.0, {0.5f, 0.0f, 0.0f}}},
            false};
}

TransferFunction tf_bluewhite() {
    return {"bluewhite", {{0.0, {0.0f, 0.0f, 0.1f}}, {0.5, {0.2f, 0.4f, 1.0f}}, {1.0, {1.0f, 1.0f, 1.0f}}}, false};
}

TransferFunction tf_by_name(const std::string& name) {
    if (name == "gray" || name == "grayscale") return tf_gray();
    if (name == "jet") return tf_jet();
    if (name == "bluewhite") return tf_bluewhite();
    throw Error(ErrorCode::InvalidArgument, "unknown transfer function '" + name + "'");
}

Rgb tf_eval(const TransferFunction& tf, double v) {
    if (tf.points.empty()) return {};
    v = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    if (v <= tf.points.front().v) return tf.points.front().color;
    for (size_t i = 1; i < tf.points.size(); ++i) {
        const ControlPoint& a = tf.points[i - 1];
        const ControlPoint& b = tf.points[i];
        if (v <= b.v) {
            const double w = (v - a.v) / (b.v - a.v);
            return Rgb(Vec3d(a.color) * (1.0 - w) + Vec3d(b.color) * w);
        }
    }
    return tf.points.back().color;
}

Rgb shade(double T, bool hit_any, const TransferFunction& tf, const Rgb& bg) {
    if (!hit_any || !(T > 0.0)) return bg;
    const double vis = -std::expm1(-T);
    const Rgb c = tf_eval(tf, vis);
    if (!tf.blend_background) return c;
    return Rgb(Vec3d(bg) * (1.0 - vis) + Vec3d(c) * vis);
}

Rgb parse_rgb(const std::string& text) {
    Rgb out;
    const char* p = text.data();
    const char* end = p + text.size();
    for (int a = 0; a < 3; ++a) {
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc() || !(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "bad color '" + text + "', expected r,g,b in [0,1]");
        out[a] = float(v);
        p = next;
        if (a < 2) {
            if (p == end || *p != ',') throw Error(ErrorCode::InvalidArgument, "bad color '" + text + "'");
            ++p;
        }
    }
    if (p != end) throw Error(ErrorCode::InvalidArgument, "bad color '" + text + "'");
    return out;
}

Film::Film(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw Error(ErrorCode::BadDims, "film dimensions must be positive");
    accum.assign(pixel_count() * 3, 0.0f);
}

void Film::clear() {
    std::fill(accum.begin(), accum.end(), 0.0f);
    subframes = 0;
}

void accumulate(Film& film, const std::vector<float>& buffer) {
    if (buffer.size() != film.accum.size()) throw Error(ErrorCode::DimMismatch, "subframe size does not match film");
    kernels::active().accumulate(film.accum.data(), buffer.data(), buffer.size());
    ++film.subframes;
}

Image8 tonemap_8bit(const Film& film) {
    Image8 img{film.width, film.height, std::vector<uint8_t>(film.accum.size())};
    kernels::active().tonemap(img.rgb.data(), film.accum.data(), film.accum.size(),
                              float(std::max(film.subframes, 1)));
    return img;
}

double psnr(const Image8& a, const Image8& b) {
    if (a.width != b.width || a.height != b.height || a.rgb.size() != b.rgb.size())
        throw Error(ErrorCode::DimMismatch, "PSNR needs images of equal size");
    if (a.rgb.empty()) throw Error(ErrorCode::BadDims, "PSNR of empty images");
    const uint64_t sse = kernels::active().squared_diff(a.rgb.data(), b.rgb.data(), a.rgb.size());
    if (sse == 0) return std::numeric_limits<double>::infinity();
    const double mse = double(sse) / double(a.rgb.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

void write_ppm(const Image8& img, std::ostream& sink) {
    if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::BadDims, "cannot write an empty image");
    if (img.rgb.size() != size_t(img.width) * size_t(img.height) * 3)
        throw Error(ErrorCode::DimMismatch, "pixel buffer does not match image size");
    sink << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    sink.write(reinterpret_cast<const char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
    if (!sink) throw Error(ErrorCode::IoFailure, "failed to write PPM");
}

std::string encode_ppm(const Image8& img) {
    std::ostringstream os(std::ios::binary);
    write_ppm(img, os);
    return std::move(os).str();
}

namespace {

int read_header_int(std::istream& is) {
    // Whitespace and '#' comments may separate header fields.
    for (;;) {
        const int c = is.peek();
        if (c == '#') {
            std::string skip;
            std::getline(is, skip);
        } else if (std::isspace(c)) {
            is.get();
        } else {
            break;
        }
    }
    int v = -1;
    if (!(is >> v)) throw Error(ErrorCode::TruncatedStream, "bad PPM header");
    return v;
}

} // namespace

Image8 read_ppm(std::istream& source) {
    char magic[2] = {};
    source.read(magic, 2);
    if (!source || magic[0] != 'P' || magic[1] != '6') throw Error(ErrorCode::BadMagic, "not a binary PPM");
    Image8 img;
    img.width = read_header_int(source);
    img.height = read_header_int(source);
    const int maxval = read_header_int(source);
    if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::BadDims, "PPM has empty dimensions");
    if (maxval != 255) throw Error(ErrorCode::InvalidArgument, "only maxval 255 is supported");
    source.get();
    img.rgb.resize(size_t(img.width) * size_t(img.height) * 3);
    source.read(reinterpret_cast<char*>(img.rgb.data()), std::streamsize(img.rgb.size()));
    if (size_t(source.gcount()) != img.rgb.size()) throw Error(ErrorCode::TruncatedStream, "PPM pixel data truncated");
    return img;
}

Image8 decode_ppm(const std::string& bytes) {
    std::istringstream is(bytes, std::ios::binary);
    return read_ppm(is);
}

void write_ppm_file(const Image8& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    write_ppm(img, os);
}

Image8 read_ppm_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    return read_ppm(is);
}

} // namespace voxgauss
