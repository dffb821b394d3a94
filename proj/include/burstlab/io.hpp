#pragma once

#include <burstlab/binning.hpp>
#include <burstlab/durations.hpp>
#include <burstlab/error.hpp>
#include <burstlab/psd.hpp>
#include <burstlab/series.hpp>

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <locale>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace burstlab {

/// Flat key=value metadata. Ordered so that output and hashes are deterministic.
using Metadata = std::map<std::string, std::string>;

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw IoError("not a number: '" + std::string(s) + "'");
    return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[v & 0xf];
        v >>= 4;
    }
    return std::string(buf, 16);
}

inline std::string metadata_hash(const Metadata& m) {
    std::uint64_t h = fnv1a("");
    for (const auto& [k, v] : m) {
        h = fnv1a(k, h);
        h = fnv1a("=", h);
        h = fnv1a(v, h);
        h = fnv1a("\n", h);
    }
    return hex64(h);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::strchr(" \t\r\n", s.front())) s.remove_prefix(1);
    while (!s.empty() && std::strchr(" \t\r\n", s.back())) s.remove_suffix(1);
    return s;
}

inline std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out) {
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
    }
    std::ofstream f(p, mode | std::ios::trunc);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f.imbue(std::locale::classic());
    return f;
}

inline std::ifstream open_in(const std::filesystem::path& p, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(p, mode);
    if (!f) throw IoError("cannot open " + p.string() + " for reading");
    return f;
}

inline void close_checked(std::ofstream& f, const std::filesystem::path& p) {
    f.close();
    if (!f) throw IoError("write to " + p.string() + " failed");
}

inline void write_header(std::ostream& os, const Metadata& m) {
    for (const auto& [k, v] : m) os << "# " << k << '=' << v << '\n';
}

}  // namespace detail

/// Parses key=value lines. Blank lines and lines starting with '#' are skipped.
inline Metadata parse_key_values(std::istream& is, std::string_view origin = "input") {
    Metadata m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw IoError(std::string(origin) + ":" + std::to_string(lineno) + ": expected key=value");
        const auto key = detail::trim(t.substr(0, eq));
        if (key.empty()) throw IoError(std::string(origin) + ":" + std::to_string(lineno) + ": empty key");
        m[std::string(key)] = std::string(detail::trim(t.substr(eq + 1)));
    }
    return m;
}

inline Metadata read_key_values(const std::filesystem::path& p) {
    auto f = detail::open_in(p);
    return parse_key_values(f, p.string());
}

inline void write_key_values(const std::filesystem::path& p, const Metadata& m) {
    auto f = detail::open_out(p);
    for (const auto& [k, v] : m) f << k << '=' << v << '\n';
    detail::close_checked(f, p);
}

/// Sidecar path for a data file: "<file>.meta".
inline std::filesystem::path meta_path(const std::filesystem::path& data) {
    return std::filesystem::path(data.string() + ".meta");
}

/// Trajectory CSV: '#'-prefixed metadata lines (t0, dt, n_samples and any extras), then
/// one sample per line.
inline void write_trajectory_csv(const std::filesystem::path& p, const TimeSeries& s, const Metadata& extra = {}) {
    auto f = detail::open_out(p);
    Metadata m = extra;
    m["t0"] = format_double(s.t0);
    m["dt"] = format_double(s.dt);
    m["n_samples"] = std::to_string(s.size());
    detail::write_header(f, m);
    std::string buf;
    buf.reserve(1 << 16);
    for (double v : s.values) {
        buf += format_double(v);
        buf += '\n';
        if (buf.size() > (1 << 16) - 64) {
            f << buf;
            buf.clear();
        }
    }
    f << buf;
    detail::close_checked(f, p);
}

inline TimeSeries read_trajectory_csv(const std::filesystem::path& p, Metadata* header = nullptr) {
    auto f = detail::open_in(p);
    TimeSeries s;
    Metadata m;
    std::string line;
    while (std::getline(f, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = detail::trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos)
                m[std::string(detail::trim(body.substr(0, eq)))] = std::string(detail::trim(body.substr(eq + 1)));
            continue;
        }
        const auto comma = t.find(',');
        s.values.push_back(parse_double(comma == std::string_view::npos ? t : t.substr(comma + 1)));
    }
    if (m.count("t0")) s.t0 = parse_double(m["t0"]);
    if (!m.count("dt")) throw IoError(p.string() + ": missing '# dt=' header");
    s.dt = parse_double(m["dt"]);
    if (m.count("n_samples") && std::to_string(s.size()) != m["n_samples"])
        throw IoError(p.string() + ": n_samples header does not match the row count");
    if (header) *header = std::move(m);
    s.validate();
    return s;
}

namespace detail {
inline constexpr char traj_magic[8] = {'B', 'L', 'T', 'R', 'A', 'J', '0', '1'};
}

/// Binary trajectory: 8-byte magic, f64 t0, f64 dt, u64 n, then n f64 values, all in
/// host byte order.
inline void write_trajectory_binary(const std::filesystem::path& p, const TimeSeries& s) {
    auto f = detail::open_out(p, std::ios::out | std::ios::binary);
    const std::uint64_t n = s.size();
    f.write(detail::traj_magic, sizeof detail::traj_magic);
    f.write(reinterpret_cast<const char*>(&s.t0), sizeof s.t0);
    f.write(reinterpret_cast<const char*>(&s.dt), sizeof s.dt);
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    f.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    detail::close_checked(f, p);
}

inline TimeSeries read_trajectory_binary(const std::filesystem::path& p) {
    auto f = detail::open_in(p, std::ios::in | std::ios::binary);
    char magic[8];
    TimeSeries s;
    std::uint64_t n = 0;
    f.read(magic, sizeof magic);
    if (!f || std::memcmp(magic, detail::traj_magic, sizeof magic) != 0) throw IoError(p.string() + ": not a trajectory file");
    f.read(reinterpret_cast<char*>(&s.t0), sizeof s.t0);
    f.read(reinterpret_cast<char*>(&s.dt), sizeof s.dt);
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!f) throw IoError(p.string() + ": truncated header");
    const auto expected = std::filesystem::file_size(p);
    if (expected != 32 + n * sizeof(double)) throw IoError(p.string() + ": size does not match sample count");
    s.values.resize(n);
    f.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw IoError(p.string() + ": truncated data");
    s.validate();
    return s;
}

/// Reads either format, chosen by the magic bytes.
inline TimeSeries read_trajectory(const std::filesystem::path& p) {
    {
        auto f = detail::open_in(p, std::ios::in | std::ios::binary);
        char magic[8] = {};
        f.read(magic, sizeof magic);
        if (f && std::memcmp(magic, detail::traj_magic, sizeof magic) == 0) return read_trajectory_binary(p);
    }
    return read_trajectory_csv(p);
}

inline void write_psd_csv(const std::filesystem::path& p, const PsdEstimate& psd, const Metadata& header = {}) {
    auto f = detail::open_out(p);
    detail::write_header(f, header);
    f << "freq,power\n";
    for (std::size_t i = 0; i < psd.freqs.size(); ++i) f << format_double(psd.freqs[i]) << ',' << format_double(psd.power[i]) << '\n';
    detail::close_checked(f, p);
}

inline void write_pdf_csv(const std::filesystem::path& p, const LogBinnedPdf& pdf, const Metadata& header = {}) {
    auto f = detail::open_out(p);
    detail::write_header(f, header);
    f << "bin_lo,bin_hi,density,count\n";
    for (std::size_t i = 0; i < pdf.size(); ++i)
        f << format_double(pdf.bin_lo[i]) << ',' << format_double(pdf.bin_hi[i]) << ',' << format_double(pdf.density[i]) << ','
          << pdf.count[i] << '\n';
    detail::close_checked(f, p);
}

inline void write_durations_csv(const std::filesystem::path& p, std::span<const DurationSample> d, const Metadata& header = {}) {
    auto f = detail::open_out(p);
    detail::write_header(f, header);
    f << "kind,t_start,t_end,duration\n";
    for (const auto& e : d)
        f << to_string(e.kind) << ',' << format_double(e.t_start) << ',' << format_double(e.t_end) << ','
          << format_double(e.duration) << '\n';
    detail::close_checked(f, p);
}

/// Generic numeric table: a header row of column names, then rows.
inline void write_table_csv(const std::filesystem::path& p, const std::vector<std::string>& columns,
                            const std::vector<std::vector<double>>& rows, const Metadata& header = {}) {
    auto f = detail::open_out(p);
    detail::write_header(f, header);
    for (std::size_t i = 0; i < columns.size(); ++i) f << (i ? "," : "") << columns[i];
    f << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << format_double(r[i]);
        f << '\n';
    }
    detail::close_checked(f, p);
}

/// Reads a table written by write_table_csv (or the PSD/PDF writers). Non-numeric
/// cells are rejected.
inline std::vector<std::vector<double>> read_table_csv(const std::filesystem::path& p, std::vector<std::string>* columns = nullptr,
                                                       Metadata* header = nullptr) {
    auto f = detail::open_in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool have_cols = false;
    Metadata m;
    while (std::getline(f, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = detail::trim(t.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos)
                m[std::string(detail::trim(body.substr(0, eq)))] = std::string(detail::trim(body.substr(eq + 1)));
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const auto c = t.find(',', start);
            cells.push_back(t.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start));
            if (c == std::string_view::npos) break;
            start = c + 1;
        }
        if (!have_cols) {
            have_cols = true;
            if (columns)
                for (auto c : cells) columns->emplace_back(detail::trim(c));
            continue;
        }
        std::vector<double> r;
        for (auto c : cells) r.push_back(parse_double(c));
        rows.push_back(std::move(r));
    }
    if (header) *header = std::move(m);
    return rows;
}

}  // namespace burstlab
