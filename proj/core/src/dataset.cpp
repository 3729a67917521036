#include "shapeservo/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "shapeservo/errors.hpp"

namespace shapeservo {

Centerline Dataset::centerline(int row) const {
    return Centerline::from_flat(shapes.row(row).transpose());
}

Dataset to_dataset(const std::vector<RodSample>& samples) {
    if (samples.empty()) throw Error("to_dataset: no samples");
    Dataset ds;
    ds.q = samples.front().grasp.command_dim();
    ds.n_points = samples.front().centerline.size();
    ds.commands.resize(samples.size(), ds.q);
    ds.shapes.resize(samples.size(), 2 * ds.n_points);
    for (size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].grasp.command_dim() != ds.q ||
            samples[i].centerline.size() != ds.n_points) {
            throw DimensionMismatchError("to_dataset: inconsistent sample dimensions");
        }
        ds.commands.row(i) = samples[i].grasp.as_command().transpose();
        ds.shapes.row(i) = samples[i].centerline.flatten().transpose();
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset " + path.string());
    out << ds.q << " " << ds.n_points << "\n";
    out << std::setprecision(17);
    for (int r = 0; r < ds.size(); ++r) {
        for (int j = 0; j < ds.q; ++j) out << ds.commands(r, j) << " ";
        for (int j = 0; j < 2 * ds.n_points; ++j) {
            out << ds.shapes(r, j) << (j + 1 == 2 * ds.n_points ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("write failed for dataset " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset " + path.string());
    Dataset ds;
    if (!(in >> ds.q >> ds.n_points) || ds.q < 1 || ds.n_points < 1) {
        throw ParseError("dataset header malformed in " + path.string());
    }
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    const size_t row_len = ds.q + 2 * ds.n_points;
    if (values.empty() || values.size() % row_len != 0) {
        throw ParseError("dataset row size mismatch in " + path.string());
    }
    const size_t rows = values.size() / row_len;
    ds.commands.resize(rows, ds.q);
    ds.shapes.resize(rows, 2 * ds.n_points);
    for (size_t r = 0; r < rows; ++r) {
        for (int j = 0; j < ds.q; ++j) ds.commands(r, j) = values[r * row_len + j];
        for (int j = 0; j < 2 * ds.n_points; ++j) {
            ds.shapes(r, j) = values[r * row_len + ds.q + j];
        }
    }
    return ds;
}

void save_centerline(const Centerline& c, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write centerline " + path.string());
    out << std::setprecision(17);
    for (const Vec2& p : c.points) out << p.x() << " " << p.y() << "\n";
    if (!out) throw IoError("write failed for centerline " + path.string());
}

Centerline load_centerline(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open centerline " + path.string());
    Centerline c;
    double u, v;
    while (in >> u >> v) c.points.emplace_back(u, v);
    if (c.points.empty()) throw ParseError("centerline file empty: " + path.string());
    return c;
}

}  // namespace shapeservo
