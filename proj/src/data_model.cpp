#include "vpos/data_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace vpos {

namespace {

constexpr std::string_view kModule = "data_model";

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_number(std::string_view text)
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

} // namespace

std::string_view field_name(Field field) noexcept
{
    switch (field) {
    case Field::DeviceId: return "device_id";
    case Field::Time: return "time";
    case Field::Longitude: return "longitude";
    case Field::Latitude: return "latitude";
    case Field::Speed: return "speed";
    case Field::Pressure: return "pressure";
    case Field::Altitude: return "altitude";
    }
    return "";
}

std::optional<Field> parse_field(std::string_view name) noexcept
{
    for (Field f : {Field::DeviceId, Field::Time, Field::Longitude, Field::Latitude,
                    Field::Speed, Field::Pressure, Field::Altitude}) {
        if (field_name(f) == name)
            return f;
    }
    return std::nullopt;
}

FeatureVector features_of(const Observation& obs)
{
    if (!obs.pressure || !obs.speed)
        throw Error(ErrorCode::MissingRequiredColumn, kModule,
                    "feature vector needs pressure and speed (device " + obs.device_id + ")");
    FeatureVector x(kFeatureDim);
    x << obs.time, obs.longitude, obs.latitude, *obs.pressure, *obs.speed;
    return x;
}

CsvSchema CsvSchema::default_schema()
{
    return CsvSchema{{"device_id", "time", "longitude", "latitude", "speed", "altitude", "pressure"}};
}

CsvSchema CsvSchema::from_header(std::string_view header_line)
{
    CsvSchema schema;
    for (auto name : split_fields(header_line))
        schema.columns.emplace_back(name);
    return schema;
}

std::string CsvSchema::header() const
{
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i)
            out += ',';
        out += columns[i];
    }
    return out;
}

ParseResult parse_csv_record(std::string_view line, const CsvSchema& schema, std::size_t row)
{
    const auto fields = split_fields(line);
    auto reject = [row](ErrorCode code, std::string detail) {
        return ParseResult{Rejection{row, code, std::move(detail)}};
    };

    bool seen_device = false, seen_time = false, seen_lon = false, seen_lat = false;
    Observation obs;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto field = parse_field(schema.columns[c]);
        if (!field)
            continue;
        if (c >= fields.size())
            return reject(ErrorCode::MissingRequiredColumn,
                          "row has no value for column '" + schema.columns[c] + "'");
        const std::string_view text = fields[c];

        if (*field == Field::DeviceId) {
            if (text.empty())
                return reject(ErrorCode::MissingRequiredColumn, "empty device_id");
            obs.device_id = std::string(text);
            seen_device = true;
            continue;
        }

        const bool required = *field == Field::Time || *field == Field::Longitude || *field == Field::Latitude;
        if (text.empty()) {
            if (required)
                return reject(ErrorCode::MissingRequiredColumn,
                              "empty required field '" + schema.columns[c] + "'");
            continue; // absent optional
        }
        const auto value = parse_number(text);
        if (!value)
            return reject(ErrorCode::MalformedNumber,
                          "column '" + schema.columns[c] + "': '" + std::string(text) + "'");

        switch (*field) {
        case Field::Time: obs.time = *value; seen_time = true; break;
        case Field::Longitude:
            if (*value < -180.0 || *value > 180.0)
                return reject(ErrorCode::CoordinateOutOfRange, "longitude " + std::string(text));
            obs.longitude = *value;
            seen_lon = true;
            break;
        case Field::Latitude:
            if (*value < -90.0 || *value > 90.0)
                return reject(ErrorCode::CoordinateOutOfRange, "latitude " + std::string(text));
            obs.latitude = *value;
            seen_lat = true;
            break;
        case Field::Speed:
            if (*value < 0.0)
                return reject(ErrorCode::MalformedNumber, "negative speed " + std::string(text));
            obs.speed = *value;
            break;
        case Field::Pressure:
            if (*value <= 0.0)
                return reject(ErrorCode::MalformedNumber, "non-positive pressure " + std::string(text));
            obs.pressure = *value;
            break;
        case Field::Altitude: obs.altitude = *value; break;
        case Field::DeviceId: break;
        }
    }
    if (!seen_device || !seen_time || !seen_lon || !seen_lat)
        return reject(ErrorCode::MissingRequiredColumn,
                      "schema lacks one of device_id, time, longitude, latitude");
    return obs;
}

LoadResult load_dataset(const std::filesystem::path& path, const CsvSchema& schema)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path.string());

    LoadResult result;
    result.dataset.provenance = path.string();
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::EmptyDataset, kModule, path.string() + " is empty");

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        ++row;
        auto parsed = parse_csv_record(line, schema, row);
        if (auto* obs = std::get_if<Observation>(&parsed)) {
            result.dataset.points.push_back(std::move(*obs));
            result.rows.push_back(row);
        } else
            result.rejections.push_back(std::get<Rejection>(std::move(parsed)));
    }
    if (result.dataset.points.empty())
        throw Error(ErrorCode::EmptyDataset, kModule, "no accepted rows in " + path.string());
    return result;
}

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_record(const Observation& obs, const CsvSchema& schema)
{
    std::string out;
    auto optional = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        if (c)
            out += ',';
        const auto field = parse_field(schema.columns[c]);
        if (!field)
            continue;
        switch (*field) {
        case Field::DeviceId: out += obs.device_id; break;
        case Field::Time: out += format_double(obs.time); break;
        case Field::Longitude: out += format_double(obs.longitude); break;
        case Field::Latitude: out += format_double(obs.latitude); break;
        case Field::Speed: out += optional(obs.speed); break;
        case Field::Pressure: out += optional(obs.pressure); break;
        case Field::Altitude: out += optional(obs.altitude); break;
        }
    }
    return out;
}

void write_dataset(std::ostream& out, const Dataset& data, const CsvSchema& schema)
{
    out << schema.header() << '\n';
    for (const auto& obs : data.points)
        out << format_record(obs, schema) << '\n';
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    write_dataset(out, data, schema);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "write failed for " + path.string());
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double train_fraction, std::uint64_t seed)
{
    if (n < 2)
        throw Error(ErrorCode::TooFewPoints, kModule, "split needs at least 2 points");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::InvalidConfig, kModule, "train fraction must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return {std::move(train), std::move(test)};
}

} // namespace vpos
