// CSV / JSON emission for grids and the persistency table.

#include <charconv>
#include <stdexcept>
#include <string>

#include "starnoise/persistency.hpp"

namespace starnoise {

namespace {

constexpr const char* kInfiniteToken = "infinite";

std::string cell_token(const RegionGrid& grid, long long value) {
  if (grid.kind == RegionGrid::CellKind::n_max && value == RegionGrid::kInfinite)
    return kInfiniteToken;
  return std::to_string(value);
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, res.ptr);
}

std::string grid_to_csv(const RegionGrid& grid) {
  std::string out;
  out.reserve(grid.values.size() * 16 + 64);
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    if (a) out += ',';
    out += grid.axes[a].name;
  }
  out += ",value\n";

  const int dims = static_cast<int>(grid.axes.size());
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  for (std::size_t cell = 0; cell < grid.values.size(); ++cell) {
    std::size_t rest = cell;
    for (int a = dims - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % static_cast<std::size_t>(grid.axes[a].resolution));
      rest /= static_cast<std::size_t>(grid.axes[a].resolution);
    }
    for (int a = 0; a < dims; ++a) {
      out += format_real(grid.coordinate(a, idx[a]));
      out += ',';
    }
    out += cell_token(grid, grid.values[cell]);
    out += '\n';
  }
  return out;
}

std::string grid_to_json(const RegionGrid& grid, const nlohmann::ordered_json& meta) {
  nlohmann::ordered_json j = meta.is_object() ? meta : nlohmann::ordered_json::object();
  j["kind"] = grid.kind == RegionGrid::CellKind::boolean ? "region" : "nmax";
  j["axes"] = nlohmann::ordered_json::array();
  for (const GridAxis& a : grid.axes)
    j["axes"].push_back({{"name", a.name}, {"min", a.lo}, {"max", a.hi},
                         {"resolution", a.resolution}});
  auto values = nlohmann::ordered_json::array();
  for (long long v : grid.values) {
    if (grid.kind == RegionGrid::CellKind::boolean)
      values.push_back(v != 0);
    else if (v == RegionGrid::kInfinite)
      values.push_back(kInfiniteToken);
    else
      values.push_back(v);
  }
  j["values"] = std::move(values);
  return j.dump(2) + "\n";
}

std::string table1_to_csv(const std::vector<Table1Row>& rows) {
  std::string out = "noise_type,param_names,param_values,star_psn,linear_psn_reference\n";
  for (const Table1Row& r : rows) {
    out += '"' + r.noise_type + "\",";
    out += '"' + r.param_names[0] + ";" + r.param_names[1] + "\",";
    out += '"' + format_real(r.params[0]) + ";" + format_real(r.params[1]) + "\",";
    out += std::to_string(r.star_psn) + ',' + std::to_string(r.linear_psn_reference) + '\n';
  }
  return out;
}

std::string table1_to_json(const std::vector<Table1Row>& rows) {
  nlohmann::ordered_json j;
  j["note"] = "linear_psn_reference values are stored reference data from prior literature, "
              "not computed here";
  j["rows"] = nlohmann::ordered_json::array();
  for (const Table1Row& r : rows)
    j["rows"].push_back({{"noise_type", r.noise_type},
                         {"param_names", {r.param_names[0], r.param_names[1]}},
                         {"params", {r.params[0], r.params[1]}},
                         {"star_psn", r.star_psn},
                         {"linear_psn_reference", r.linear_psn_reference}});
  return j.dump(2) + "\n";
}

}  // namespace starnoise
