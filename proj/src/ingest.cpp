#include "spfcast/ingest.hpp"

#include <charconv>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spfcast/csv.hpp"
#include "spfcast/numeric.hpp"

namespace spfcast {

namespace {

double parse_decimal(const std::string& s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        raise(ErrorCode::Parse, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        raise(ErrorCode::Parse, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

void require_columns(const CsvTable& t, std::initializer_list<const char*> names) {
    for (const char* name : names) {
        if (t.column(name) < 0) {
            raise(ErrorCode::Parse, std::string("missing required column '") + name + "'");
        }
    }
}

}  // namespace

VintageStore parse_cpi_csv(const std::string& text) {
    CsvTable t = parse_csv(text);
    require_columns(t, {"vintage", "month", "level"});
    int cv = t.column("vintage"), cm = t.column("month"), cl = t.column("level");
    VintageStore store;
    for (const auto& row : t.rows) {
        Quarter vintage = Quarter::parse(row[cv]);
        int midx = parse_month(row[cm]);
        double level = parse_decimal(row[cl], "level");
        store.add(vintage, midx / 12, midx % 12 + 1, level);
    }
    store.freeze();
    return store;
}

SurveyPanel parse_spf_csv(const std::string& text) {
    CsvTable t = parse_csv(text);
    require_columns(t, {"origin", "horizon", "forecaster_id", "value"});
    int co = t.column("origin"), ch = t.column("horizon");
    int ci = t.column("forecaster_id"), cv = t.column("value");
    SurveyPanel panel;
    for (const auto& row : t.rows) {
        panel.add(Quarter::parse(row[co]), parse_int(row[ch], "horizon"), row[ci],
                  parse_decimal(row[cv], "value"));
    }
    panel.freeze();
    return panel;
}

Stores load_stores_csv(const std::string& cpi_path, const std::string& spf_path) {
    Stores s;
    s.cpi = parse_cpi_csv(read_file(cpi_path));
    s.spf = parse_spf_csv(read_file(spf_path));
    s.cpi_hash = fnv1a64_hex(cpi_to_csv(s.cpi));
    s.spf_hash = fnv1a64_hex(spf_to_csv(s.spf));
    return s;
}

std::string cpi_to_csv(const VintageStore& store) {
    std::ostringstream out;
    out << "vintage,month,level\n";
    for (const auto& [vintage, series] : store.monthly()) {
        for (std::size_t i = 0; i < series.levels.size(); ++i) {
            out << vintage.str() << ',' << month_index_str(series.first_month + static_cast<int>(i))
                << ',' << format_double(series.levels[i]) << '\n';
        }
    }
    return out.str();
}

std::string spf_to_csv(const SurveyPanel& panel) {
    std::ostringstream out;
    out << "origin,horizon,forecaster_id,value\n";
    for (const auto& rec : panel.records()) {
        out << rec.origin.str() << ',' << rec.horizon << ',' << rec.forecaster_id << ','
            << format_double(rec.value) << '\n';
    }
    return out.str();
}

void write_store_dir(const std::string& dir, const Stores& stores) {
    std::filesystem::create_directories(dir);
    std::string cpi = cpi_to_csv(stores.cpi);
    std::string spf = spf_to_csv(stores.spf);
    write_file(dir + "/cpi_vintages.csv", cpi);
    write_file(dir + "/spf_panel.csv", spf);
    nlohmann::json manifest;
    manifest["cpi_hash"] = fnv1a64_hex(cpi);
    manifest["spf_hash"] = fnv1a64_hex(spf);
    manifest["cpi_vintages"] = stores.cpi.size();
    manifest["spf_records"] = stores.spf.record_count();
    write_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

Stores load_store_dir(const std::string& dir) {
    return load_stores_csv(dir + "/cpi_vintages.csv", dir + "/spf_panel.csv");
}

}  // namespace spfcast
