#include "sdg/io.hpp"

#include <cstring>
#include <fstream>

namespace sdg {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

void put_u32(std::ofstream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u8(std::ofstream& out, uint8_t v) { out.write(reinterpret_cast<const char*>(&v), 1); }
void put_f64(std::ofstream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t get_u32(std::ifstream& in) {
    uint32_t v;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
uint8_t get_u8(std::ifstream& in) {
    uint8_t v;
    in.read(reinterpret_cast<char*>(&v), 1);
    return v;
}
double get_f64(std::ifstream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_grid_spec(std::ofstream& out, const TimeGrid& tg, const StateGrid& sg) {
    put_f64(out, tg.t0);
    put_f64(out, tg.horizon);
    put_u32(out, static_cast<uint32_t>(tg.n_steps));
    put_u32(out, static_cast<uint32_t>(sg.dim()));
    for (const Vec& ax : sg.axes) {
        put_u32(out, static_cast<uint32_t>(ax.size()));
        for (double v : ax) put_f64(out, v);
    }
}

constexpr char kMagic[4] = {'S', 'D', 'G', 'B'};
constexpr uint8_t kKindValueField = 1;
constexpr uint8_t kKindBsde = 2;

} // namespace

void write_paths_csv(const std::string& path, const std::vector<PathBundle>& bundles,
                     const LevyMeasure& measure) {
    auto out = open_out(path);
    if (bundles.empty()) throw ConfigError("write_paths_csv: no bundles");
    const int d = bundles[0].brownian_dim;
    out << "step,path";
    for (int j = 1; j <= d; ++j) out << ",dB_" << j;
    out << ",n_jumps,marks\n";
    for (size_t p = 0; p < bundles.size(); ++p) {
        const PathBundle& b = bundles[p];
        for (int k = 0; k < b.grid.n_steps; ++k) {
            out << k << ',' << p;
            for (int j = 0; j < d; ++j) out << ',' << format_double(b.brownian_increments[k][j]);
            out << ',' << b.jump_events[k].size() << ',';
            for (size_t e = 0; e < b.jump_events[k].size(); ++e) {
                if (e) out << ';';
                const Vec& mark = measure.atoms[b.jump_events[k][e].atom].mark;
                for (size_t q = 0; q < mark.size(); ++q) out << (q ? "|" : "") << format_double(mark[q]);
            }
            out << '\n';
        }
    }
}

void write_trajectory_csv(const std::string& path, const ProblemSpec& spec,
                          const ForwardTrajectory& traj) {
    auto out = open_out(path);
    out << "step,time";
    for (int i = 1; i <= spec.state_dim; ++i) out << ",x_" << i;
    out << ",u,v\n";
    for (size_t k = 0; k < traj.states.size(); ++k) {
        out << k << ',' << format_double(traj.grid.time(static_cast<int>(k)));
        for (double c : traj.states[k]) out << ',' << format_double(c);
        if (k < traj.u_indices.size()) {
            const Vec& u = spec.u_set.at(traj.u_indices[k]);
            const Vec& v = spec.v_set.at(traj.v_indices[k]);
            out << ',' << format_double(u[0]) << ',' << format_double(v[0]);
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

void write_bsde_csv(const std::string& path, const BsdeSolution& sol) {
    auto out = open_out(path);
    const int d = sol.z.empty() || sol.z[0].empty() ? 0 : static_cast<int>(sol.z[0][0].size());
    out << "step,node";
    for (int q = 0; q < sol.sgrid.dim(); ++q) out << ",x_" << (q + 1);
    out << ",y";
    for (int j = 1; j <= d; ++j) out << ",z_" << j;
    out << ",k_bar\n";
    for (int k = 0; k <= sol.tgrid.n_steps; ++k) {
        for (long i = 0; i < sol.sgrid.size(); ++i) {
            out << k << ',' << i;
            for (double c : sol.sgrid.node(i)) out << ',' << format_double(c);
            out << ',' << format_double(sol.y[k][i]);
            if (k < sol.tgrid.n_steps) {
                for (int j = 0; j < d; ++j) out << ',' << format_double(sol.z[k][i][j]);
                out << ',' << format_double(sol.k_bar[k][i]);
            } else {
                for (int j = 0; j < d; ++j) out << ',';
                out << ',';
            }
            out << '\n';
        }
    }
}

void write_value_csv(const std::string& path, const ValueField& field) {
    auto out = open_out(path);
    out << "step,time,node";
    for (int q = 0; q < field.sgrid.dim(); ++q) out << ",x_" << (q + 1);
    out << ",value,u_idx,v_idx\n";
    for (int k = 0; k <= field.tgrid.n_steps; ++k) {
        for (long i = 0; i < field.sgrid.size(); ++i) {
            out << k << ',' << format_double(field.tgrid.time(k)) << ',' << i;
            for (double c : field.sgrid.node(i)) out << ',' << format_double(c);
            out << ',' << format_double(field.values[k][i]);
            if (k < field.tgrid.n_steps)
                out << ',' << field.u_sel[k][i] << ',' << field.v_sel[k][i];
            else
                out << ",,";
            out << '\n';
        }
    }
}

void write_pide_csv(const std::string& path, const PideSolution& sol) {
    auto out = open_out(path);
    out << "step,time,node,x,value\n";
    for (int k = 0; k <= sol.tgrid.n_steps; ++k)
        for (long i = 0; i < sol.sgrid.size(); ++i)
            out << k << ',' << format_double(sol.tgrid.time(k)) << ',' << i << ','
                << format_double(sol.sgrid.node(i)[0]) << ',' << format_double(sol.values[k][i]) << '\n';
}

void write_value_binary(const std::string& path, const ValueField& field) {
    auto out = open_out(path, true);
    out.write(kMagic, 4);
    put_u32(out, 1);
    put_u8(out, kKindValueField);
    put_u8(out, field.which == GameSide::Lower ? 0 : 1);
    write_grid_spec(out, field.tgrid, field.sgrid);
    for (const Vec& slice : field.values)
        for (double v : slice) put_f64(out, v);
}

void write_bsde_binary(const std::string& path, const BsdeSolution& sol) {
    auto out = open_out(path, true);
    out.write(kMagic, 4);
    put_u32(out, 1);
    put_u8(out, kKindBsde);
    const uint8_t d = sol.z.empty() || sol.z[0].empty() ? 0 : static_cast<uint8_t>(sol.z[0][0].size());
    put_u8(out, d);
    write_grid_spec(out, sol.tgrid, sol.sgrid);
    for (const Vec& slice : sol.y)
        for (double v : slice) put_f64(out, v);
    for (const auto& slice : sol.z)
        for (const Vec& zz : slice)
            for (double v : zz) put_f64(out, v);
    for (const Vec& slice : sol.k_bar)
        for (double v : slice) put_f64(out, v);
}

ValueField read_value_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dump file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("dump file: bad magic");
    if (get_u32(in) != 1) throw ParseError("dump file: unsupported version");
    if (get_u8(in) != kKindValueField) throw ParseError("dump file: not a value field");
    ValueField field;
    field.which = get_u8(in) == 0 ? GameSide::Lower : GameSide::Upper;
    double t0 = get_f64(in);
    double horizon = get_f64(in);
    int n_steps = static_cast<int>(get_u32(in));
    field.tgrid = TimeGrid(t0, horizon, n_steps);
    int dim = static_cast<int>(get_u32(in));
    std::vector<Vec> axes(dim);
    for (int q = 0; q < dim; ++q) {
        int n = static_cast<int>(get_u32(in));
        axes[q].resize(n);
        for (int i = 0; i < n; ++i) axes[q][i] = get_f64(in);
    }
    field.sgrid = StateGrid(std::move(axes));
    field.values.assign(n_steps + 1, Vec(field.sgrid.size(), 0.0));
    for (auto& slice : field.values)
        for (double& v : slice) v = get_f64(in);
    if (!in) throw ParseError("dump file: truncated");
    return field;
}

} // namespace sdg
