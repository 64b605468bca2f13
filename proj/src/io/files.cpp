#include "levyhedge/io/files.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "levyhedge/errors.hpp"

namespace levyhedge::io {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("surface_file", "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CsvWriter::CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
        if (!first) buffer_ += ',';
        buffer_ += h;
        first = false;
    }
    buffer_ += '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (row_open_) buffer_ += ',';
    buffer_ += v;
    row_open_ = true;
    return *this;
}

void CsvWriter::end_row() {
    buffer_ += '\n';
    row_open_ = false;
}

std::string paths_csv(const std::vector<SamplePath>& paths) {
    CsvWriter out{"path_id", "event_index", "time", "jump_size", "x_left", "x_right", "is_default"};
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        for (std::size_t j = 0; j < path.jump_count(); ++j) {
            const bool is_default = path.tau_index && *path.tau_index == j;
            out.cell(std::uint64_t{p})
                .cell(std::uint64_t{j})
                .cell(path.jump_times[j])
                .cell(path.jump_sizes[j])
                .cell(path.level_before(j))
                .cell(path.levels[j])
                .cell(std::uint64_t{is_default ? 1u : 0u})
                .end_row();
        }
    }
    return out.str();
}

std::string surface_csv(const ValueSurface& surface) {
    CsvWriter out{"t", "x", "f_hat", "std_err"};
    for (Eigen::Index i = 0; i < surface.t_grid.size(); ++i)
        for (Eigen::Index j = 0; j < surface.x_grid.size(); ++j)
            out.cell(surface.t_grid(i)).cell(surface.x_grid(j)).cell(surface.values(i, j)).cell(surface.std_err(i, j)).end_row();
    return out.str();
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json payoff_json(const Payoff& p) {
    return {{"kind", p.kind_name()}, {"p0", p.p0()}, {"p1", p.p1()}, {"p2", p.p2()}};
}

Payoff payoff_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const double p0 = j.at("p0").get<double>();
    const double p1 = j.at("p1").get<double>();
    const double p2 = j.at("p2").get<double>();
    if (kind == "constant") return Payoff::constant(p0);
    if (kind == "linear") return Payoff::linear(p0, p1);
    if (kind == "exp_shift") return Payoff::exp_shift(p0, p1, p2);
    throw ConfigError("surface_file", "unknown payoff kind '" + kind + "'");
}

// Parses one CSV field as a double; the writer only emits plain numbers.
double parse_field(std::string_view s, const fs::path& file) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ConfigError("surface_file", "malformed number in '" + file.string() + "'");
    return v;
}

}  // namespace

json surface_metadata(const ValueSurface& surface, const json& model, const std::string& values_file) {
    return {
        {"model", model},
        {"horizon", surface.horizon},
        {"t_grid", to_vector(surface.t_grid)},
        {"x_grid", to_vector(surface.x_grid)},
        {"payoff", payoff_json(surface.payoff)},
        {"n_paths_per_node", surface.n_paths_per_node},
        {"seed", surface.seed},
        {"values_file", values_file},
    };
}

std::vector<fs::path> save_surface(const fs::path& dir, const ValueSurface& surface, const json& model) {
    const auto csv = dir / "surface.csv";
    const auto meta = dir / "surface.json";
    write_atomic(csv, surface_csv(surface));
    write_atomic(meta, surface_metadata(surface, model, "surface.csv").dump(2) + "\n");
    return {csv, meta};
}

ValueSurface load_surface(const fs::path& metadata_path) {
    json meta;
    try {
        meta = json::parse(read_file(metadata_path));
    } catch (const json::parse_error& e) {
        throw ConfigError("surface_file", std::string("invalid JSON: ") + e.what());
    }

    ValueSurface s;
    try {
        const auto t = meta.at("t_grid").get<std::vector<double>>();
        const auto x = meta.at("x_grid").get<std::vector<double>>();
        s.t_grid = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
        s.x_grid = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
        s.horizon = meta.at("horizon").get<double>();
        s.payoff = payoff_from_json(meta.at("payoff"));
        s.n_paths_per_node = meta.at("n_paths_per_node").get<std::size_t>();
        s.seed = meta.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError("surface_file", std::string("bad surface metadata: ") + e.what());
    }

    const auto values_path = metadata_path.parent_path() / meta.value("values_file", std::string("surface.csv"));
    const auto body = read_file(values_path);
    const Eigen::Index nt = s.t_grid.size();
    const Eigen::Index nx = s.x_grid.size();
    s.values.resize(nt, nx);
    s.std_err.resize(nt, nx);

    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    if (line != "t,x,f_hat,std_err") throw ConfigError("surface_file", "unexpected CSV header in '" + values_path.string() + "'");
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= nt * nx) throw ConfigError("surface_file", "too many rows in '" + values_path.string() + "'");
        double fields[4];
        std::size_t start = 0;
        for (int k = 0; k < 4; ++k) {
            const auto comma = line.find(',', start);
            const auto stop = k == 3 ? line.size() : comma;
            if (stop == std::string::npos) throw ConfigError("surface_file", "short row in '" + values_path.string() + "'");
            fields[k] = parse_field(std::string_view(line).substr(start, stop - start), values_path);
            start = stop + 1;
        }
        const Eigen::Index i = row / nx;
        const Eigen::Index j = row % nx;
        if (fields[0] != s.t_grid(i) || fields[1] != s.x_grid(j))
            throw ConfigError("surface_file", "CSV grid does not match metadata in '" + values_path.string() + "'");
        s.values(i, j) = fields[2];
        s.std_err(i, j) = fields[3];
        ++row;
    }
    if (row != nt * nx) throw ConfigError("surface_file", "missing rows in '" + values_path.string() + "'");
    return s;
}

CsvWriter hedge_csv_writer() { return CsvWriter{"path_id", "date", "x", "theta", "eta", "V", "L", "C"}; }

void append_hedge_csv(CsvWriter& out, std::uint64_t path_id, const HedgeRecord& r) {
    for (Eigen::Index k = 0; k < r.size(); ++k)
        out.cell(path_id)
            .cell(r.dates(k))
            .cell(r.x(k))
            .cell(r.theta(k))
            .cell(r.eta(k))
            .cell(r.value(k))
            .cell(r.hedge_error(k))
            .cell(r.cost(k))
            .end_row();
}

}  // namespace levyhedge::io
