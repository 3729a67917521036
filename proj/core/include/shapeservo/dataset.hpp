#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "shapeservo/rod.hpp"

namespace shapeservo {

/// Command/shape pairs with a fixed command dimension q and centerline length N.
///
/// File format: header line with the two integers `q N`, then one row per
/// sample holding q command values followed by the 2N interleaved centerline
/// coordinates, space separated, full precision.
struct Dataset {
    int q = 0;
    int n_points = 0;
    Eigen::MatrixXd commands;  // n_samples x q
    Eigen::MatrixXd shapes;    // n_samples x 2N

    int size() const { return static_cast<int>(shapes.rows()); }
    Centerline centerline(int row) const;
};

Dataset to_dataset(const std::vector<RodSample>& samples);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

// Centerline text rows `u v`, one point per line.
void save_centerline(const Centerline& c, const std::filesystem::path& path);
Centerline load_centerline(const std::filesystem::path& path);

}  // namespace shapeservo
