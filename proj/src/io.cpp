#include "cellwall/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cellwall/error.hpp"

namespace cellwall::io {

namespace {

double parse_double(const std::string& tok, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(context + ": cannot parse number \"" + tok + "\"");
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    if (sep == ' ') {
        while (ss >> cur) out.push_back(cur);
    } else {
        while (std::getline(ss, cur, sep)) out.push_back(cur);
    }
    return out;
}

std::string macro_mesh_reference(const MacroMesh& mesh) {
    std::ostringstream s;
    s << "box " << format_double(mesh.extents[0]) << ' ' << format_double(mesh.extents[1]) << ' '
      << format_double(mesh.extents[2]) << " cells " << mesh.cells[0] << ' ' << mesh.cells[1] << ' '
      << mesh.cells[2] << " nodes " << mesh.num_nodes();
    return s.str();
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

std::string format_voigt_table(const Voigt6& c, const std::string& comment) {
    std::ostringstream s;
    if (!comment.empty()) s << "# " << comment << '\n';
    s << "# rows/columns 11 22 33 23 13 12, MPa\n";
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) s << (j ? " " : "") << format_double(c(i, j));
        s << '\n';
    }
    return s.str();
}

void write_voigt_table(const Tensor4& t, const std::string& path, const std::string& comment) {
    write_text_file(path, format_voigt_table(t.voigt_matrix(), comment));
}

Voigt6 parse_voigt_table(const std::string& text) {
    Voigt6 c;
    std::istringstream in(text);
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, ' ');
        if (f.empty()) continue;
        if (row >= 6) throw IoError("Voigt table has more than six rows");
        if (f.size() != 6) throw IoError("Voigt table row " + std::to_string(row + 1) + " does not have six fields");
        for (int j = 0; j < 6; ++j) c(row, j) = parse_double(f[static_cast<std::size_t>(j)], "Voigt table");
        ++row;
    }
    if (row != 6) throw IoError("Voigt table has " + std::to_string(row) + " rows, expected six");
    return c;
}

Voigt6 read_voigt_table(const std::string& path) {
    try {
        return parse_voigt_table(read_text_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

std::string trajectory_header() {
    std::string h = "time";
    for (const char* name : chemistry::kSpeciesNames) {
        for (const char* stat : {"min", "mean", "max"}) h += std::string(",") + name + "_" + stat;
    }
    return h + ",strain_norm,inner_iters,contraction_ratio";
}

std::string format_trajectory_row(const TrajectoryRow& r) {
    std::string s = format_double(r.time);
    for (int i = 0; i < chemistry::kNumSpecies; ++i) {
        s += "," + format_double(r.min[i]) + "," + format_double(r.mean[i]) + "," + format_double(r.max[i]);
    }
    return s + "," + format_double(r.strain_norm) + "," + std::to_string(r.inner_iters) + "," +
           format_double(r.contraction_ratio);
}

void write_trajectory(const std::vector<TrajectoryRow>& rows, const std::string& path) {
    std::string text = trajectory_header() + "\n";
    for (const auto& r : rows) text += format_trajectory_row(r) + "\n";
    write_text_file(path, text);
}

std::vector<TrajectoryRow> read_trajectory(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != trajectory_header()) throw IoError(path + ": unexpected trajectory header");
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 1 + 3 * chemistry::kNumSpecies + 3) throw IoError(path + ": malformed trajectory row");
        TrajectoryRow r;
        std::size_t k = 0;
        r.time = parse_double(f[k++], path);
        for (int i = 0; i < chemistry::kNumSpecies; ++i) {
            r.min[i] = parse_double(f[k++], path);
            r.mean[i] = parse_double(f[k++], path);
            r.max[i] = parse_double(f[k++], path);
        }
        r.strain_norm = parse_double(f[k++], path);
        r.inner_iters = static_cast<int>(parse_double(f[k++], path));
        r.contraction_ratio = parse_double(f[k++], path);
        rows.push_back(r);
    }
    return rows;
}

std::string format_snapshot(const macro::MacroState& state, const MacroMesh& mesh) {
    std::ostringstream s;
    s << "cellwall-snapshot 1\n";
    s << "mesh " << macro_mesh_reference(mesh) << '\n';
    s << "time " << format_double(state.time) << '\n';
    s << "step " << state.step << '\n';
    s << "dt_next " << format_double(state.dt_next) << '\n';
    auto block = [&](const char* name, const macro::Vector& v) {
        s << "field " << name << ' ' << v.size() << '\n';
        for (Eigen::Index i = 0; i < v.size(); ++i) s << format_double(v(i)) << '\n';
    };
    for (int i = 0; i < chemistry::kNumSpecies; ++i) block(chemistry::kSpeciesNames[i], state.species[i]);
    block("u", state.u);
    block("signal", state.signal);
    s << "end\n";
    return s.str();
}

macro::MacroState parse_snapshot(const std::string& text, const MacroMesh& mesh) {
    std::istringstream in(text);
    std::string line;
    auto next = [&](const char* expect) {
        if (!std::getline(in, line)) throw IoError(std::string("snapshot truncated before ") + expect);
        const std::string prefix = std::string(expect) + " ";
        if (line.rfind(prefix, 0) != 0 && line != expect) {
            throw IoError(std::string("snapshot: expected '") + expect + "', found '" + line + "'");
        }
        return line.size() > prefix.size() ? line.substr(prefix.size()) : std::string();
    };
    if (next("cellwall-snapshot") != "1") throw IoError("snapshot: unsupported format version");
    if (next("mesh") != macro_mesh_reference(mesh)) throw IoError("snapshot was written for a different macro mesh");
    macro::MacroState st;
    st.time = parse_double(next("time"), "snapshot time");
    st.step = static_cast<long>(parse_double(next("step"), "snapshot step"));
    st.dt_next = parse_double(next("dt_next"), "snapshot dt_next");
    auto block = [&](const char* name, Eigen::Index expected) {
        const auto f = split(next("field"), ' ');
        if (f.size() != 2 || f[0] != name) throw IoError(std::string("snapshot: expected field ") + name);
        const auto n = static_cast<Eigen::Index>(parse_double(f[1], "snapshot field size"));
        if (n != expected) throw IoError(std::string("snapshot: field ") + name + " has the wrong size");
        macro::Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw IoError(std::string("snapshot: field ") + name + " truncated");
            v(i) = parse_double(line, std::string("snapshot field ") + name);
        }
        return v;
    };
    const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
    for (int i = 0; i < chemistry::kNumSpecies; ++i) st.species[i] = block(chemistry::kSpeciesNames[i], n);
    st.u = block("u", 3 * n);
    st.signal = block("signal", n);
    next("end");
    return st;
}

void write_snapshot(const macro::MacroState& state, const MacroMesh& mesh, const std::string& path) {
    write_text_file(path, format_snapshot(state, mesh));
}

macro::MacroState read_snapshot(const std::string& path, const MacroMesh& mesh) {
    try {
        return parse_snapshot(read_text_file(path), mesh);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace cellwall::io
