#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

/// Minimal static SVG line charts (fans and small multiples).
namespace svarkit::app::svg {

struct Line {
  std::vector<double> y;
  std::string color = "#000000";
  bool dashed = false;
};

struct Band {
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color = "#bbbbbb";
};

struct Chart {
  std::string title;
  std::vector<double> x;
  std::vector<Band> bands;
  std::vector<Line> lines;
  std::optional<double> reference;  // horizontal reference line (e.g. zero or a threshold)
};

/// Grid of charts, `columns` per row. Output depends only on the inputs.
std::string render(std::span<const Chart> charts, int columns, const std::string& title);

}  // namespace svarkit::app::svg
