#include "driftmeter/pitch_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "driftmeter/errors.hpp"

namespace driftmeter {

std::size_t PitchTrack::voiced_count() const {
    return static_cast<std::size_t>(
        std::count_if(frames.begin(), frames.end(), [](const PitchFrame& f) { return f.voiced; }));
}

void YinConfig::validate() const {
    if (frame_size <= 0 || hop_size <= 0 || hop_size > frame_size)
        throw ArgumentError("yin-config: need 0 < hop_size <= frame_size");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ArgumentError("yin-config: threshold must be in (0,1)");
    if (!(f0_min_hz > 0.0 && f0_min_hz < f0_max_hz))
        throw ArgumentError("yin-config: need 0 < f0_min_hz < f0_max_hz");
}

namespace {

struct CsvRow {
    double time = 0.0;
    double f0 = 0.0;
    double confidence = 1.0;
};

bool parse_double(std::string_view field, double& out) {
    // trim spaces and CR
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() &&
           (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

double median_gap(const std::vector<CsvRow>& rows) {
    std::vector<double> gaps;
    gaps.reserve(rows.size());
    for (std::size_t i = 1; i < rows.size(); ++i) gaps.push_back(rows[i].time - rows[i - 1].time);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    return n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
}

void format_double(std::string& out, double v) {
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    out.append(buf.data(), ptr);
}

} // namespace

PitchTrack load_pitch_csv(std::istream& source, std::optional<double> hop_hint_sec,
                          const CsvBand& band) {
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;

    while (std::getline(source, line)) {
        ++line_no;
        std::string_view sv(line);
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
        if (sv.empty()) continue;
        if (sv.front() == '#') continue;

        auto fields = split_fields(sv);
        if (fields.size() < 2 || fields.size() > 3)
            throw InputError("csv-parse: row " + std::to_string(line_no) +
                             ": expected 2 or 3 fields, got " + std::to_string(fields.size()));

        CsvRow row;
        if (!parse_double(fields[0], row.time)) {
            // The first content line is a header when none of its fields is
            // numeric ("time,frequency"). A lone bad field is a parse error.
            if (first_content_line) {
                bool any_numeric = false;
                double scratch;
                for (const auto& f : fields) any_numeric = any_numeric || parse_double(f, scratch);
                if (!any_numeric) {
                    first_content_line = false;
                    continue;
                }
            }
            throw InputError("csv-parse: row " + std::to_string(line_no) +
                             ": non-numeric time field");
        }
        if (!parse_double(fields[1], row.f0))
            throw InputError("csv-parse: row " + std::to_string(line_no) +
                             ": non-numeric f0 field");
        if (fields.size() == 3) {
            if (!parse_double(fields[2], row.confidence))
                throw InputError("csv-parse: row " + std::to_string(line_no) +
                                 ": non-numeric confidence field");
            row.confidence = std::clamp(row.confidence, 0.0, 1.0);
        }
        first_content_line = false;
        if (row.time < 0.0)
            throw InputError("csv-parse: row " + std::to_string(line_no) + ": negative timestamp");
        rows.push_back(row);
    }

    if (rows.empty()) throw InputError("empty-track: pitch CSV contains no data rows");

    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].time <= rows[i - 1].time)
            throw InputError("csv-order: timestamps not strictly increasing near row value t=" +
                             std::to_string(rows[i].time));

    double hop;
    if (hop_hint_sec) {
        hop = *hop_hint_sec;
    } else if (rows.size() >= 2) {
        hop = median_gap(rows);
    } else {
        throw InputError("csv-hop: cannot infer hop from a single row; pass a hop hint");
    }
    if (!(hop > 0.0)) throw InputError("csv-hop: non-positive hop spacing");

    PitchTrack track;
    track.hop_sec = hop;
    track.frames.reserve(rows.size());

    auto push_row = [&](const CsvRow& r) {
        const bool in_band = r.f0 >= band.f0_min_hz && r.f0 <= band.f0_max_hz;
        if (r.f0 > 0.0 && in_band)
            track.frames.push_back(PitchFrame::voiced_at(r.time, r.f0, r.confidence));
        else
            track.frames.push_back(PitchFrame::unvoiced_at(r.time));
    };

    push_row(rows[0]);
    const double total_span = rows.back().time - rows.front().time;
    if (total_span / hop > 5e7)
        throw InputError("csv-hop: hop spacing too small for the track's time span");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double gap = rows[i].time - rows[i - 1].time;
        if (gap > 1.5 * hop) {
            // Materialize the silent stretch as unvoiced frames at hop spacing.
            for (double t = rows[i - 1].time + hop; t < rows[i].time - 0.5 * hop; t += hop)
                track.frames.push_back(PitchFrame::unvoiced_at(t));
        }
        push_row(rows[i]);
    }
    return track;
}

void save_pitch_csv(const PitchTrack& track, std::ostream& out) {
    std::string buf = "# time_sec,f0_hz,confidence\n";
    for (const auto& f : track.frames) {
        if (!f.voiced) continue;
        format_double(buf, f.time_sec);
        buf.push_back(',');
        format_double(buf, f.f0_hz);
        buf.push_back(',');
        format_double(buf, f.confidence);
        buf.push_back('\n');
    }
    out << buf;
}

} // namespace driftmeter
