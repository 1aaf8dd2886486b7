#include "lfvs/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lfvs/common.hpp"

namespace lfvs {

Tensor<float> read_png_rgb(const std::filesystem::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
  require_data(!img.empty(), "cannot read image: " + path.string());
  require_data(img.type() == CV_8UC3, "expected 8-bit color image: " + path.string());
  const int h = img.rows, w = img.cols;
  Tensor<float> out({3, h, w});
  for (int y = 0; y < h; ++y) {
    const cv::Vec3b* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      // OpenCV loads BGR.
      out.at(0, y, x) = float(row[x][2]) / 255.0f;
      out.at(1, y, x) = float(row[x][1]) / 255.0f;
      out.at(2, y, x) = float(row[x][0]) / 255.0f;
    }
  }
  return out;
}

namespace {

uint8_t to_u8(float v) {
  float s = std::round(v * 255.0f);
  if (s < 0.0f) s = 0.0f;
  if (s > 255.0f) s = 255.0f;
  return uint8_t(s);
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, const Tensor<float>& rgb01) {
  require(rgb01.rank() == 3 && rgb01.dim(0) == 3, "write_png_rgb: expected (3,H,W)");
  const int h = rgb01.height(), w = rgb01.width();
  cv::Mat img(h, w, CV_8UC3);
  for (int y = 0; y < h; ++y) {
    cv::Vec3b* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      row[x][2] = to_u8(rgb01.at(0, y, x));
      row[x][1] = to_u8(rgb01.at(1, y, x));
      row[x][0] = to_u8(rgb01.at(2, y, x));
    }
  }
  require_data(cv::imwrite(path.string(), img), "cannot write image: " + path.string());
}

void write_png_gray(const std::filesystem::path& path, const Tensor<float>& gray01) {
  require(gray01.rank() == 3 && gray01.dim(0) == 1, "write_png_gray: expected (1,H,W)");
  const int h = gray01.height(), w = gray01.width();
  cv::Mat img(h, w, CV_8UC1);
  for (int y = 0; y < h; ++y) {
    uint8_t* row = img.ptr<uint8_t>(y);
    for (int x = 0; x < w; ++x) row[x] = to_u8(gray01.at(0, y, x));
  }
  require_data(cv::imwrite(path.string(), img), "cannot write image: " + path.string());
}

Tensor<float> read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(bool(in), "cannot open PFM: " + path.string());
  std::string magic;
  in >> magic;
  require_data(magic == "Pf", "not a grayscale PFM: " + path.string());
  int w = 0, h = 0;
  double scale = 0.0;
  in >> w >> h >> scale;
  require_data(w > 0 && h > 0, "bad PFM dimensions: " + path.string());
  require_data(scale < 0, "big-endian PFM not supported: " + path.string());
  in.get();  // single whitespace after the header
  Tensor<float> out({1, h, w});
  std::vector<float> row(size_t(w));
  for (int y = h - 1; y >= 0; --y) {  // PFM stores bottom-up
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(sizeof(float)) * w);
    require_data(bool(in), "truncated PFM: " + path.string());
    for (int x = 0; x < w; ++x) out.at(0, y, x) = row[size_t(x)];
  }
  return out;
}

void write_pfm(const std::filesystem::path& path, const Tensor<float>& map) {
  require(map.rank() == 3 && map.dim(0) == 1, "write_pfm: expected (1,H,W)");
  std::ofstream out(path, std::ios::binary);
  require_data(bool(out), "cannot write PFM: " + path.string());
  const int h = map.height(), w = map.width();
  out << "Pf\n" << w << " " << h << "\n-1.0\n";
  for (int y = h - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char*>(&map.at(0, y, 0)),
              std::streamsize(sizeof(float)) * w);
  require_data(bool(out), "short write: " + path.string());
}

}  // namespace lfvs
