#include "bsq/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "bsq/errors.hpp"

namespace bsq {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write_sidecar(const std::filesystem::path& path, const Grid2D& g,
                   const std::string& kind) {
    json j;
    j["n"] = g.n;
    j["box_length"] = g.box_length;
    j["kind"] = kind;
    j["dtype"] = "float64";
    j["layout"] = "row-major, x1 fastest";
    std::ofstream os(path.string() + ".json");
    if (!os) throw IoError("cannot open " + path.string() + ".json");
    os << j.dump(2) << '\n';
}

json read_sidecar(const std::filesystem::path& path) {
    std::ifstream is(path.string() + ".json");
    if (!is) throw IoError("missing sidecar for " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("bad sidecar for " + path.string() + ": " + e.what());
    }
    return j;
}

void write_planes(const std::filesystem::path& path,
                  std::initializer_list<const RealVec*> planes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string());
    for (const RealVec* p : planes)
        os.write(reinterpret_cast<const char*>(p->data()),
                 static_cast<std::streamsize>(p->size() * sizeof(double)));
    if (!os) throw IoError("write failed: " + path.string());
}

void read_planes(const std::filesystem::path& path,
                 std::initializer_list<RealVec*> planes) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    for (RealVec* p : planes) {
        is.read(reinterpret_cast<char*>(p->data()),
                static_cast<std::streamsize>(p->size() * sizeof(double)));
        if (is.gcount() !=
            static_cast<std::streamsize>(p->size() * sizeof(double)))
            throw IoError("short read: " + path.string());
    }
}

Grid2D grid_from_sidecar(const json& j, const std::filesystem::path& path,
                         const std::string& want_kind) {
    if (!j.contains("n") || !j.contains("box_length") || !j.contains("kind"))
        throw IoError("incomplete sidecar for " + path.string());
    if (j["kind"].get<std::string>() != want_kind)
        throw IoError("expected kind '" + want_kind + "' in " + path.string());
    return Grid2D{j["n"].get<int>(), j["box_length"].get<double>()};
}

} // namespace

void dump_field(const std::filesystem::path& path, const ScalarField& f) {
    write_planes(path, {&f.v});
    write_sidecar(path, f.grid, "scalar");
}

void dump_field(const std::filesystem::path& path, const VectorField2& f,
                const std::string& kind) {
    write_planes(path, {&f.x1.v, &f.x2.v});
    write_sidecar(path, f.grid(), kind);
}

ScalarField load_scalar(const std::filesystem::path& path) {
    Grid2D g = grid_from_sidecar(read_sidecar(path), path, "scalar");
    ScalarField f(g);
    read_planes(path, {&f.v});
    return f;
}

VectorField2 load_vector(const std::filesystem::path& path) {
    json j = read_sidecar(path);
    if (!j.contains("kind")) throw IoError("incomplete sidecar for " + path.string());
    const std::string kind = j["kind"].get<std::string>();
    if (kind != "vector2" && kind != "diffeo")
        throw IoError("expected a vector field in " + path.string());
    Grid2D g{j["n"].get<int>(), j["box_length"].get<double>()};
    VectorField2 f(g);
    read_planes(path, {&f.x1.v, &f.x2.v});
    return f;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    os << "t,div_u_l2,u_l2,u_hs,theta_hs,min_det,max_speed\n";
    for (const TrajectorySample& s : t.samples) {
        os << format_double(s.t) << ',' << format_double(s.div_u_l2) << ','
           << format_double(s.u_l2) << ',' << format_double(s.u_hs) << ','
           << format_double(s.theta_hs) << ',' << format_double(s.min_det)
           << ',' << format_double(s.max_speed) << '\n';
    }
    if (!os) throw IoError("write failed: " + path.string());
}

void write_experiment_csv(const std::filesystem::path& path,
                          const std::vector<ExperimentRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    os << "n,r_n,input_gap,output_gap,separation,lower_bound_separation,"
          "containment_radius,containment_radius_tilde,images_disjoint,"
          "ratio,ratio_tilde,status\n";
    for (const ExperimentRecord& r : records) {
        os << r.n << ',' << format_double(r.r_n) << ','
           << format_double(r.input_gap) << ',' << format_double(r.output_gap)
           << ',' << format_double(r.separation) << ','
           << format_double(r.lower_bound_separation) << ','
           << format_double(r.containment_radius) << ','
           << format_double(r.containment_radius_tilde) << ','
           << (r.images_disjoint ? 1 : 0) << ',' << format_double(r.ratio)
           << ',' << format_double(r.ratio_tilde) << ',' << r.status << '\n';
    }
    if (!os) throw IoError("write failed: " + path.string());
}

void write_experiment_summary(const std::filesystem::path& path,
                              const ExperimentSummary& s) {
    json j;
    j["m"] = s.m;
    j["lipschitz"] = s.lipschitz;
    j["probe_norm"] = s.probe_norm;
    j["base_ratio"] = s.base_ratio;
    j["c1_band"] = {s.c1_band_min, s.c1_band_max};
    j["slope_input"] = s.slope_input;
    j["gap_retention"] = s.gap_retention;
    j["input_fall"] = s.input_fall;
    j["resolvable"] = s.resolvable;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write failed: " + path.string());
}

} // namespace bsq
