#include "stripscreen/csv.hpp"

#include <charconv>
#include <chrono>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "stripscreen/error.hpp"
#include "stripscreen/text.hpp"

namespace stripscreen::data {

namespace {

constexpr int kFixedColumns = 8;
constexpr int kTotalColumns = kFixedColumns + 3 * kPadCount;

std::vector<std::string> expected_columns() {
    std::vector<std::string> cols = {"id",       "center",  "age",
                                     "gender",   "diabetes", "blood_pressure",
                                     "smoking",  "pcr_label"};
    for (PadId pad : all_pads()) {
        const std::string token(pad_token(pad));
        cols.push_back(token + "_R");
        cols.push_back(token + "_G");
        cols.push_back(token + "_B");
    }
    return cols;
}

struct RowError {
    std::string column;
    std::string message;
};

bool parse_int(std::string_view s, int& out) {
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

bool parse_flag(std::string_view s, TriFlag& out) {
    if (s == "1") { out = TriFlag::positive; return true; }
    if (s == "0") { out = TriFlag::negative; return true; }
    if (s == "NA") { out = TriFlag::unknown; return true; }
    return false;
}

std::string_view flag_token(TriFlag f) {
    switch (f) {
        case TriFlag::positive: return "1";
        case TriFlag::negative: return "0";
        case TriFlag::unknown: return "NA";
    }
    return "NA";
}

// Parses one data row; returns the first violation if any.
std::optional<RowError> parse_row(const std::vector<std::string>& fields,
                                  const std::vector<std::string>& columns,
                                  StripSample& out) {
    out.id = fields[0];
    if (out.id.empty()) return RowError{"id", "empty id"};

    const auto center = center_from_name(fields[1]);
    if (!center) return RowError{"center", "unknown center code '" + fields[1] + "'"};
    out.center = *center;

    int age = 0;
    if (!parse_int(fields[2], age) || age < 0)
        return RowError{"age", "unparsable or negative age '" + fields[2] + "'"};
    out.age = age;

    if (fields[3] == "M") out.gender = Gender::male;
    else if (fields[3] == "F") out.gender = Gender::female;
    else return RowError{"gender", "gender must be M or F, got '" + fields[3] + "'"};

    if (!parse_flag(fields[4], out.diabetes))
        return RowError{"diabetes", "flag must be 1, 0 or NA, got '" + fields[4] + "'"};
    if (!parse_flag(fields[5], out.blood_pressure))
        return RowError{"blood_pressure", "flag must be 1, 0 or NA, got '" + fields[5] + "'"};
    if (!parse_flag(fields[6], out.smoking))
        return RowError{"smoking", "flag must be 1, 0 or NA, got '" + fields[6] + "'"};

    if (fields[7] == "1") out.pcr_positive = true;
    else if (fields[7] == "0") out.pcr_positive = false;
    else return RowError{"pcr_label", "label must be 1 or 0, got '" + fields[7] + "'"};

    for (int p = 0; p < kPadCount; ++p) {
        std::uint8_t rgb[3];
        for (int c = 0; c < 3; ++c) {
            const int col = kFixedColumns + 3 * p + c;
            int v = 0;
            if (!parse_int(fields[col], v) || v < 0 || v > 255)
                return RowError{columns[col],
                                "channel value '" + fields[col] + "' out of [0,255]"};
            rgb[c] = static_cast<std::uint8_t>(v);
        }
        out.pads[p] = Rgb24{rgb[0], rgb[1], rgb[2]};
    }
    return std::nullopt;
}

}  // namespace

std::string csv_header() {
    const auto cols = expected_columns();
    std::string header;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) header += ',';
        header += cols[i];
    }
    return header;
}

Dataset ingest_csv(const std::filesystem::path& path, bool strict,
                   IngestReport* report) {
    const std::string content = read_file(path);
    const auto columns = expected_columns();

    Dataset ds;
    ds.source = path.string();
    ds.ingested_at = std::chrono::system_clock::now();
    IngestReport local;
    IngestReport& rep = report ? *report : local;

    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    ++line_no;
    {
        const auto fields = stripscreen::split(trim(line), ',');
        if (fields.size() != columns.size())
            throw DataError(path.string() + ": header has " + std::to_string(fields.size()) +
                            " columns, expected " + std::to_string(columns.size()));
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (fields[i] != columns[i])
                throw DataError(path.string() + ": header column " + std::to_string(i + 1) +
                                " is '" + fields[i] + "', expected '" + columns[i] + "'");
        }
    }

    std::unordered_set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = trim(line);
        if (trimmed.empty()) continue;
        ++rep.rows_read;
        const auto fields = stripscreen::split(trimmed, ',');

        auto reject = [&](const std::string& id, const std::string& reason) {
            if (strict)
                throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " +
                                reason);
            rep.rejected.push_back(RowRejection{line_no, id, reason});
        };

        if (fields.size() != columns.size()) {
            reject(fields.empty() ? "" : fields[0],
                   "row has " + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(columns.size()));
            continue;
        }
        StripSample sample;
        if (const auto err = parse_row(fields, columns, sample)) {
            reject(fields[0], "column " + err->column + ": " + err->message);
            continue;
        }
        if (!seen_ids.insert(sample.id).second) {
            reject(sample.id, "duplicate id '" + sample.id + "'");
            continue;
        }
        ds.samples.push_back(std::move(sample));
        ++rep.rows_kept;
    }
    return ds;
}

std::string to_csv(const Dataset& ds) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& s : ds.samples) {
        out += s.id;
        out += ',';
        out += center_name(s.center);
        out += ',';
        out += std::to_string(s.age);
        out += ',';
        out += (s.gender == Gender::male ? "M" : "F");
        out += ',';
        out += flag_token(s.diabetes);
        out += ',';
        out += flag_token(s.blood_pressure);
        out += ',';
        out += flag_token(s.smoking);
        out += ',';
        out += (s.pcr_positive ? "1" : "0");
        for (const auto& pad : s.pads) {
            out += ',';
            out += std::to_string(static_cast<int>(pad.r));
            out += ',';
            out += std::to_string(static_cast<int>(pad.g));
            out += ',';
            out += std::to_string(static_cast<int>(pad.b));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    write_file(path, to_csv(ds));
}

}  // namespace stripscreen::data
