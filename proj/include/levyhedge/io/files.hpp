#pragma once

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "levyhedge/hedging.hpp"
#include "levyhedge/path_sim.hpp"
#include "levyhedge/value_surface.hpp"

namespace levyhedge::io {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<const char*> header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::uint64_t v);
    CsvWriter& cell(const std::string& v);
    void end_row();

    const std::string& str() const noexcept { return buffer_; }

private:
    std::string buffer_;
    bool row_open_ = false;
};

/// path_id, event_index, time, jump_size, x_left, x_right, is_default.
std::string paths_csv(const std::vector<SamplePath>& paths);

/// t, x, f_hat, std_err.
std::string surface_csv(const ValueSurface& surface);

/// Grids, payoff, horizon, seed, path count and the name of the values CSV.
nlohmann::json surface_metadata(const ValueSurface& surface, const nlohmann::json& model,
                                const std::string& values_file);

/// Writes surface.csv and surface.json into `dir`; returns both paths.
std::vector<std::filesystem::path> save_surface(const std::filesystem::path& dir, const ValueSurface& surface,
                                                const nlohmann::json& model);

/// Reads a surface from its JSON metadata file and the CSV next to it.
ValueSurface load_surface(const std::filesystem::path& metadata_path);

/// path_id, date, x, theta, eta, V, L, C.
void append_hedge_csv(CsvWriter& out, std::uint64_t path_id, const HedgeRecord& record);
CsvWriter hedge_csv_writer();

}  // namespace levyhedge::io
