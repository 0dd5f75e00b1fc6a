#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace frbs {

/// Grayscale image with intensities in [0, maxval].
struct GrayImage {
  Eigen::MatrixXd pixels;
  int maxval = 255;
};

/// Reads binary (P5) or ASCII (P2) portable graymaps, 8- or 16-bit.
GrayImage read_pgm(const std::filesystem::path& path);

/// Writes a binary P5 graymap; values are rounded and clamped to [0, maxval].
/// maxval > 255 selects 16-bit big-endian samples.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Comma-separated matrix, one row per line.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace frbs
