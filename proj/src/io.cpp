#include "sfcabm/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sfcabm {

namespace {

class FieldReader {
public:
    FieldReader(std::string_view line, std::size_t line_no) : rest_(line), line_no_(line_no) {}

    std::string_view next() {
        if (done_) {
            fail("too few fields");
        }
        const auto comma = rest_.find(',');
        std::string_view field = rest_.substr(0, comma);
        if (comma == std::string_view::npos) {
            done_ = true;
        } else {
            rest_.remove_prefix(comma + 1);
        }
        return field;
    }

    template <typename T>
    T number() {
        const auto field = next();
        T value{};
        const auto* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, value);
        if (ec != std::errc{} || ptr != end || field.empty()) {
            fail("bad number '" + std::string(field) + "'");
        }
        return value;
    }

    void finish() const {
        if (!done_) {
            fail("too many fields");
        }
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("csv line " + std::to_string(line_no_) + ": " + what);
    }

    std::string_view rest_;
    std::size_t line_no_;
    bool done_ = false;
};

template <typename Row, typename ParseRow>
std::vector<Row> parse_csv(std::string_view text, std::string_view header, ParseRow parse_row) {
    std::vector<Row> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool saw_header = false;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (!saw_header) {
            if (line != header) {
                throw std::runtime_error("csv: unexpected header '" + std::string(line) + "'");
            }
            saw_header = true;
            continue;
        }
        FieldReader reader(line, line_no);
        rows.push_back(parse_row(reader));
        reader.finish();
    }
    if (!saw_header) {
        throw std::runtime_error("csv: missing header");
    }
    return rows;
}

} // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_short(double x) {
    char buf[32];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

std::string write_timeseries_csv(const std::vector<TimeSeriesRow>& rows) {
    std::string out(timeseries_header);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.t) + ',' + format_double(r.unemployment_rate) + ',' +
               std::to_string(r.n_active_firms) + ',' + std::to_string(r.n_bankruptcies) + ',' +
               std::to_string(r.job_losses_bankruptcy) + ',' + format_double(r.aggregate_debt) + ',' +
               format_double(r.mu_eff) + ',' + std::to_string(r.total_output) + ',' +
               std::to_string(r.total_demand) + ',' + std::to_string(r.total_sold) + ',' +
               format_double(r.bank_equity) + ',' + format_double(r.conservation_residual) + '\n';
    }
    return out;
}

std::string write_cross_section_csv(const FirmCrossSection& cross) {
    std::string out(cross_section_header);
    out += '\n';
    for (const auto& f : cross) {
        out += std::to_string(f.id) + ',' + std::to_string(f.age) + ',' + format_double(f.mu) + ',' +
               format_double(f.mu_gross_realized) + ',' + format_double(f.mu_net_realized) + ',' +
               std::to_string(f.size) + ',' + std::to_string(f.q_produced) + ',' +
               std::to_string(f.q_sold) + ',' + format_double(f.cash) + ',' + format_double(f.debt) +
               ',' + format_double(f.equity) + '\n';
    }
    return out;
}

std::vector<TimeSeriesRow> parse_timeseries_csv(std::string_view text) {
    return parse_csv<TimeSeriesRow>(text, timeseries_header, [](FieldReader& in) {
        TimeSeriesRow r;
        r.t = in.number<std::int64_t>();
        r.unemployment_rate = in.number<double>();
        r.n_active_firms = in.number<std::int64_t>();
        r.n_bankruptcies = in.number<std::int64_t>();
        r.job_losses_bankruptcy = in.number<std::int64_t>();
        r.aggregate_debt = in.number<double>();
        r.mu_eff = in.number<double>();
        r.total_output = in.number<std::int64_t>();
        r.total_demand = in.number<std::int64_t>();
        r.total_sold = in.number<std::int64_t>();
        r.bank_equity = in.number<double>();
        r.conservation_residual = in.number<double>();
        return r;
    });
}

FirmCrossSection parse_cross_section_csv(std::string_view text) {
    return parse_csv<FirmRecord>(text, cross_section_header, [](FieldReader& in) {
        FirmRecord f;
        f.id = in.number<std::uint64_t>();
        f.age = in.number<std::int64_t>();
        f.mu = in.number<double>();
        f.mu_gross_realized = in.number<double>();
        f.mu_net_realized = in.number<double>();
        f.size = in.number<std::int64_t>();
        f.q_produced = in.number<std::int64_t>();
        f.q_sold = in.number<std::int64_t>();
        f.cash = in.number<double>();
        f.debt = in.number<double>();
        f.equity = in.number<double>();
        return f;
    });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

} // namespace sfcabm
