#include "frbs/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "frbs/errors.hpp"

namespace frbs {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  while (in) {
    int ch = in.peek();
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  in >> tok;
  return tok;
}

int header_int(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("pgm: bad ") + what + " '" + tok + "'");
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("pgm: cannot open " + path.string());

  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") throw UsageError("pgm: unsupported magic '" + magic + "'");
  const int cols = header_int(in, "width");
  const int rows = header_int(in, "height");
  const int maxval = header_int(in, "maxval");
  if (maxval > 65535) throw UsageError("pgm: maxval above 65535");

  GrayImage img;
  img.maxval = maxval;
  img.pixels.resize(rows, cols);

  if (magic == "P2") {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        int v = 0;
        if (!(in >> v)) throw UsageError("pgm: truncated ASCII data");
        img.pixels(i, j) = v;
      }
    }
    return img;
  }

  in.get();  // single whitespace after maxval
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw UsageError("pgm: truncated binary data");
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      int v = raw[k++];
      if (bytes == 2) v = (v << 8) | raw[k++];
      img.pixels(i, j) = v;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.maxval < 1 || image.maxval > 65535) throw UsageError("pgm: maxval must be in [1, 65535]");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("pgm: cannot write " + path.string());
  const auto rows = image.pixels.rows(), cols = image.pixels.cols();
  out << "P5\n" << cols << ' ' << rows << '\n' << image.maxval << '\n';
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double clamped = std::min<double>(std::max(0.0, std::round(image.pixels(i, j))), image.maxval);
      const auto v = static_cast<unsigned>(clamped);
      if (image.maxval > 255) out.put(static_cast<char>((v >> 8) & 0xff));
      out.put(static_cast<char>(v & 0xff));
    }
  }
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("csv: cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw UsageError("csv: bad number '" + cell + "' in " + path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw UsageError("csv: ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw UsageError("csv: empty file " + path.string());
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw UsageError("csv: cannot write " + path.string());
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace frbs
