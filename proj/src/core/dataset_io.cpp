#include "bpred/core/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bpred/core/text.hpp"

namespace bpred {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 8> kFixedColumns{
    "situation_id", "t_rec", "lane_width", "marking_left", "marking_right", "ttlcl", "ttlcr", "label"};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + p.string());
}

/// Iterates the lines of a file buffer, tracking 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::string_view buf) : buf_(buf) {}
    bool next(std::string_view& line) {
        if (pos_ >= buf_.size()) return false;
        auto end = buf_.find('\n', pos_);
        if (end == std::string_view::npos) end = buf_.size();
        line = buf_.substr(pos_, end - pos_);
        pos_ = end + 1;
        ++line_no_;
        return true;
    }
    std::size_t line_no() const { return line_no_; }

private:
    std::string_view buf_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

double require_number(std::string_view cell, const std::string& file, std::size_t line,
                      std::string_view column, bool allow_inf) {
    auto v = parse_double(cell);
    if (!v || (!allow_inf && std::isinf(*v)))
        throw ParseError(file, line,
                         "row " + std::to_string(line - 1) + ": column '" + std::string(column) +
                             "' is not a finite number: '" + std::string(cell) + "'");
    return *v;
}

json descriptor_to_json(const FeatureDescriptor& f) {
    json j;
    j["id"] = f.id;
    j["kind"] = f.kind == FeatureKind::Nominal ? "nominal" : "continuous";
    j["unit"] = f.unit;
    if (f.kind == FeatureKind::Nominal) j["nominal_values"] = f.nominal_values;
    if (!f.description.empty()) j["description"] = f.description;
    return j;
}

}  // namespace

void save_catalog(const Catalog& catalog, const std::filesystem::path& file) {
    json arr = json::array();
    for (const auto& f : catalog.features()) arr.push_back(descriptor_to_json(f));
    write_file(file, json{{"features", arr}}.dump(2) + "\n");
}

Catalog load_catalog(const std::filesystem::path& file) {
    json j;
    try {
        j = json::parse(read_file(file));
    } catch (const json::parse_error& e) {
        throw ParseError(file.string(), 0, e.what());
    }
    Catalog cat;
    try {
        for (const auto& f : j.at("features")) {
            FeatureDescriptor d;
            d.id = f.at("id").get<std::string>();
            const auto kind = f.at("kind").get<std::string>();
            if (kind == "nominal")
                d.kind = FeatureKind::Nominal;
            else if (kind == "continuous")
                d.kind = FeatureKind::Continuous;
            else
                throw ParseError(file.string(), 0, "feature '" + d.id + "': unknown kind '" + kind + "'");
            d.unit = f.value("unit", "");
            if (f.contains("nominal_values")) d.nominal_values = f["nominal_values"].get<std::vector<int>>();
            d.description = f.value("description", "");
            cat.add(std::move(d));
        }
    } catch (const json::exception& e) {
        throw ParseError(file.string(), 0, e.what());
    } catch (const DomainError& e) {
        throw ParseError(file.string(), 0, e.what());
    }
    return cat;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_catalog(dataset.catalog, dir / "catalog.json");

    std::string out;
    out.reserve(dataset.sample_count() * (16 + 12 * dataset.catalog.size()) + 256);
    for (std::size_t c = 0; c < kFixedColumns.size(); ++c) {
        if (c) out += ',';
        out += kFixedColumns[c];
    }
    for (const auto& f : dataset.catalog.features()) {
        out += ',';
        out += f.id;
    }
    out += '\n';

    std::string fut = "situation_id,t_rec,x,y\n";
    fut.reserve(dataset.sample_count() * 40 + 32);

    for (const auto& sit : dataset.situations) {
        if (sit.track.size() != sit.samples.size() || sit.markings.size() != sit.samples.size())
            throw DomainError("situation " + std::to_string(sit.situation_id) +
                              ": track/markings length differs from sample count");
        for (std::size_t i = 0; i < sit.samples.size(); ++i) {
            const Sample& s = sit.samples[i];
            if (s.features.size() != dataset.catalog.size())
                throw DomainError("sample feature count does not match catalog");
            out += std::to_string(s.situation_id);
            out += ',';
            append_double(out, s.t_rec);
            out += ',';
            append_double(out, sit.lane_width);
            out += ',';
            append_double(out, sit.markings[i].left);
            out += ',';
            append_double(out, sit.markings[i].right);
            out += ',';
            append_double(out, s.ttlcl);
            out += ',';
            append_double(out, s.ttlcr);
            out += ',';
            out += to_string(s.label);
            for (double v : s.features) {
                out += ',';
                append_double(out, v);
            }
            out += '\n';

            fut += std::to_string(s.situation_id);
            fut += ',';
            append_double(fut, s.t_rec);
            fut += ',';
            append_double(fut, sit.track[i].x);
            fut += ',';
            append_double(fut, sit.track[i].y);
            fut += '\n';
        }
    }
    write_file(dir / "dataset.csv", out);
    write_file(dir / "futures.csv", fut);
}

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    ds.catalog = load_catalog(dir / "catalog.json");

    const auto data_path = (dir / "dataset.csv").string();
    const std::string data = read_file(dir / "dataset.csv");
    LineReader lines(data);
    std::string_view line;
    if (!lines.next(line)) throw ParseError(data_path, 1, "missing header");
    const auto header = split_csv(line);
    if (header.size() < kFixedColumns.size())
        throw ParseError(data_path, 1, "header has too few columns");
    for (std::size_t c = 0; c < kFixedColumns.size(); ++c)
        if (header[c] != kFixedColumns[c])
            throw ParseError(data_path, 1,
                             "expected column '" + std::string(kFixedColumns[c]) + "', found '" +
                                 std::string(header[c]) + "'");
    const std::size_t n_feat = header.size() - kFixedColumns.size();
    if (n_feat != ds.catalog.size())
        throw ParseError(data_path, 1,
                         "header lists " + std::to_string(n_feat) + " features, catalog has " +
                             std::to_string(ds.catalog.size()));
    for (std::size_t c = 0; c < n_feat; ++c) {
        const auto id = header[kFixedColumns.size() + c];
        auto idx = ds.catalog.find(id);
        if (!idx) throw ParseError(data_path, 1, "unknown feature id '" + std::string(id) + "'");
        if (*idx != c)
            throw ParseError(data_path, 1, "feature '" + std::string(id) + "' out of catalog order");
    }

    Situation* cur = nullptr;
    while (lines.next(line)) {
        if (line.empty() || line == "\r") continue;
        const auto ln = lines.line_no();
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ParseError(data_path, ln,
                             "row " + std::to_string(ln - 1) + ": expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()));
        auto sid = parse_int(cells[0]);
        if (!sid) throw ParseError(data_path, ln, "row " + std::to_string(ln - 1) + ": bad situation_id");
        Sample s;
        s.situation_id = *sid;
        s.t_rec = require_number(cells[1], data_path, ln, kFixedColumns[1], false);
        const double lane_width = require_number(cells[2], data_path, ln, kFixedColumns[2], false);
        Markings m{require_number(cells[3], data_path, ln, kFixedColumns[3], false),
                   require_number(cells[4], data_path, ln, kFixedColumns[4], false)};
        s.ttlcl = require_number(cells[5], data_path, ln, kFixedColumns[5], true);
        s.ttlcr = require_number(cells[6], data_path, ln, kFixedColumns[6], true);
        if (s.ttlcl < 0 || s.ttlcr < 0)
            throw ParseError(data_path, ln, "row " + std::to_string(ln - 1) + ": negative time to lane change");
        try {
            s.label = parse_maneuver(cells[7]);
        } catch (const DomainError& e) {
            throw ParseError(data_path, ln, "row " + std::to_string(ln - 1) + ": " + e.what());
        }
        s.features.resize(n_feat);
        for (std::size_t c = 0; c < n_feat; ++c)
            s.features[c] = require_number(cells[kFixedColumns.size() + c], data_path, ln,
                                           ds.catalog[c].id, false);
        if (cur == nullptr || cur->situation_id != s.situation_id) {
            ds.situations.emplace_back();
            cur = &ds.situations.back();
            cur->situation_id = s.situation_id;
            cur->lane_width = lane_width;
        }
        cur->markings.push_back(m);
        cur->samples.push_back(std::move(s));
    }

    const auto fut_path = (dir / "futures.csv").string();
    const std::string fut = read_file(dir / "futures.csv");
    LineReader flines(fut);
    if (!flines.next(line) || split_csv(line) != std::vector<std::string_view>{"situation_id", "t_rec", "x", "y"})
        throw ParseError(fut_path, 1, "expected header situation_id,t_rec,x,y");
    for (auto& sit : ds.situations) {
        sit.track.reserve(sit.samples.size());
        for (const auto& s : sit.samples) {
            do {
                if (!flines.next(line)) throw ParseError(fut_path, flines.line_no(), "unexpected end of file");
            } while (line.empty());
            const auto ln = flines.line_no();
            const auto cells = split_csv(line);
            if (cells.size() != 4) throw ParseError(fut_path, ln, "expected 4 cells");
            auto sid = parse_int(cells[0]);
            const double t = require_number(cells[1], fut_path, ln, "t_rec", false);
            if (!sid || *sid != s.situation_id || t != s.t_rec)
                throw ParseError(fut_path, ln, "row key does not match dataset.csv");
            sit.track.push_back({require_number(cells[2], fut_path, ln, "x", false),
                                 require_number(cells[3], fut_path, ln, "y", false)});
        }
    }
    return ds;
}

}  // namespace bpred
