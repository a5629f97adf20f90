#include "logsample/baseline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "logsample/errors.hpp"
#include "number_format.hpp"

namespace logsample {

namespace {

constexpr std::string_view kSignatureToken = "#prefix";

std::string majority(const std::map<std::string, std::size_t>& labels) {
    // Map order is ascending, so the first maximum is the smallest label.
    const auto best = std::max_element(labels.begin(), labels.end(), [](const auto& a, const auto& b) {
        return a.second < b.second;
    });
    return best == labels.end() ? std::string{} : best->first;
}

std::string last_activity(const FeatureSchema& schema, std::span<const double> features) {
    const auto tokens = decode_window(schema, features);
    return tokens.empty() ? std::string(kPadToken) : tokens.back();
}

void require_task(const FeatureTable& table, Task task) {
    if (table.schema.task != task)
        throw TaskMismatch("expected a " + std::string(to_string(task)) + " table, got " +
                           std::string(to_string(table.schema.task)));
}

void require_schema(const FeatureSchema& model_schema, const FeatureTable& table) {
    if (!(model_schema == table.schema))
        throw SchemaMismatch("feature table schema differs from the model's");
}

}  // namespace

// ---------------------------------------------------------------------------

NgramModel::NgramModel(FeatureSchema schema, std::size_t order)
    : schema_(std::move(schema)), order_(order) {
    if (order_ < 1) throw UsageError("n-gram order must be >= 1");
}

std::vector<Context> NgramModel::contexts(std::span<const double> features) const {
    const auto tokens = decode_window(schema_, features);
    std::vector<Context> out;
    if (schema_.task == Task::outcome) {
        Context signature{std::string(kSignatureToken)};
        const auto counts = features.subspan(schema_.counts_offset(), schema_.vocabulary_size());
        for (double c : counts) signature.push_back(detail::format_number(c));
        signature.insert(signature.end(), tokens.begin(), tokens.end());
        out.push_back(std::move(signature));
    }
    const std::size_t longest = std::min(order_ - 1, tokens.size());
    for (std::size_t k = longest; k >= 1; --k)
        out.emplace_back(tokens.end() - static_cast<long>(k), tokens.end());
    out.emplace_back();
    return out;
}

void NgramModel::add(std::span<const double> features, const std::string& label) {
    for (auto& ctx : contexts(features)) ++counts_[std::move(ctx)][label];
}

void NgramModel::add_count(Context context, std::string label, std::size_t count) {
    if (count == 0) return;
    counts_[std::move(context)][std::move(label)] += count;
}

std::string NgramModel::predict(std::span<const double> features) const {
    for (const auto& ctx : contexts(features))
        if (const auto it = counts_.find(ctx); it != counts_.end() && !it->second.empty())
            return majority(it->second);
    return {};
}

// ---------------------------------------------------------------------------

PrefixStatModel::PrefixStatModel(FeatureSchema schema) : schema_(std::move(schema)) {}

std::size_t PrefixStatModel::bucket(std::size_t prefix_length) {
    return std::min<std::size_t>(prefix_length, 16);
}

void PrefixStatModel::add(const std::string& last_activity, std::size_t prefix_length,
                          double seconds) {
    auto& acc = buckets_[{last_activity, bucket(prefix_length)}];
    acc.sum += seconds;
    ++acc.count;
    global_.sum += seconds;
    ++global_.count;
}

void PrefixStatModel::set_bucket(const std::string& last_activity, std::size_t bucket,
                                 double mean, std::size_t count) {
    buckets_[{last_activity, bucket}] = Accumulator{mean * static_cast<double>(count), count};
}

void PrefixStatModel::set_global(double mean, std::size_t count) {
    global_ = Accumulator{mean * static_cast<double>(count), count};
}

double PrefixStatModel::predict(const std::string& last_activity, std::size_t prefix_length) const {
    const auto it = buckets_.find({last_activity, bucket(prefix_length)});
    if (it != buckets_.end() && it->second.count > 0) return it->second.mean();
    return global_.mean();
}

// ---------------------------------------------------------------------------

NgramModel train_next_activity(const FeatureTable& table, std::size_t order) {
    require_task(table, Task::next_activity);
    NgramModel model(table.schema, order);
    for (std::size_t r = 0; r < table.size(); ++r)
        model.add(table.features(r), table.schema.target_label(table.rows[r].target));
    return model;
}

NgramModel train_outcome(const FeatureTable& table, std::size_t order) {
    require_task(table, Task::outcome);
    NgramModel model(table.schema, order);
    for (std::size_t r = 0; r < table.size(); ++r)
        model.add(table.features(r), table.schema.target_label(table.rows[r].target));
    return model;
}

PrefixStatModel train_remaining_time(const FeatureTable& table) {
    require_task(table, Task::remaining_time);
    PrefixStatModel model(table.schema);
    for (std::size_t r = 0; r < table.size(); ++r)
        model.add(last_activity(table.schema, table.features(r)), table.rows[r].prefix_length,
                  table.rows[r].target);
    return model;
}

BaselineModel train_baseline(const FeatureTable& table, std::size_t order) {
    switch (table.schema.task) {
        case Task::next_activity: return train_next_activity(table, order);
        case Task::outcome: return train_outcome(table, order);
        case Task::remaining_time: return train_remaining_time(table);
    }
    throw TaskMismatch("unknown task");
}

std::string predict(const NgramModel& model, const FeatureTable& table, std::size_t row) {
    require_schema(model.schema(), table);
    return model.predict(table.features(row));
}

double predict(const PrefixStatModel& model, const FeatureTable& table, std::size_t row) {
    require_schema(model.schema(), table);
    return model.predict(last_activity(table.schema, table.features(row)),
                         table.rows[row].prefix_length);
}

AbsoluteMetrics evaluate(const BaselineModel& model, const FeatureTable& table,
                         F1Averaging averaging) {
    AbsoluteMetrics metrics;
    if (const auto* ngram = std::get_if<NgramModel>(&model)) {
        require_schema(ngram->schema(), table);
        std::vector<LabelPair> pairs;
        pairs.reserve(table.size());
        for (std::size_t r = 0; r < table.size(); ++r)
            pairs.push_back({ngram->predict(table.features(r)),
                             table.schema.target_label(table.rows[r].target)});
        const auto scores = classification_metrics(pairs, averaging);
        metrics.accuracy = scores.accuracy;
        metrics.f1 = scores.f1;
    } else {
        const auto& stat = std::get<PrefixStatModel>(model);
        std::vector<double> errors;
        errors.reserve(table.size());
        for (std::size_t r = 0; r < table.size(); ++r)
            errors.push_back(predict(stat, table, r) - table.rows[r].target);
        const auto scores = regression_metrics(errors);
        metrics.mae_seconds = scores.mae;
        metrics.rmse_seconds = scores.rmse;
    }
    return metrics;
}

// ---------------------------------------------------------------------------

namespace {

std::string escape_token(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '|': out += "\\|"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<std::string> split_escaped(std::string_view s, char sep) {
    std::vector<std::string> out(1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            const char n = s[++i];
            out.back() += n == 't' ? '\t' : n == 'n' ? '\n' : n;
        } else if (c == sep) {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

std::string join_context(const Context& ctx) {
    std::string out;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (i) out += '|';
        out += escape_token(ctx[i]);
    }
    return out;
}

template <class T>
T parse_field(const std::string& text, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(line, "bad number '" + text + "'");
    return value;
}

constexpr std::string_view kNgramHeader = "# logsample ngram v1";
constexpr std::string_view kPrefixStatHeader = "# logsample prefix-stat v1";

}  // namespace

void write_model(const BaselineModel& model, std::ostream& out) {
    if (const auto* ngram = std::get_if<NgramModel>(&model)) {
        out << kNgramHeader << '\n';
        out << "task\t" << to_string(ngram->schema().task) << '\n';
        out << "order\t" << ngram->order() << '\n';
        for (const auto& [ctx, labels] : ngram->counts())
            for (const auto& [label, count] : labels)
                out << "count\t" << join_context(ctx) << '\t' << escape_token(label) << '\t'
                    << count << '\n';
        return;
    }
    const auto& stat = std::get<PrefixStatModel>(model);
    out << kPrefixStatHeader << '\n';
    out << "task\t" << to_string(stat.schema().task) << '\n';
    out << "global\t" << detail::format_number(stat.global().mean()) << '\t'
        << stat.global().count << '\n';
    for (const auto& [key, acc] : stat.buckets())
        out << "bucket\t" << escape_token(key.first) << '\t' << key.second << '\t'
            << detail::format_number(acc.mean()) << '\t' << acc.count << '\n';
}

void write_model(const BaselineModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_model(model, out);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

BaselineModel read_model(std::istream& in, const FeatureSchema& schema) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(1, "empty model file");
    const bool is_ngram = line == kNgramHeader;
    if (!is_ngram && line != kPrefixStatHeader) throw ParseError(1, "unknown model header");

    std::optional<NgramModel> ngram;
    std::optional<PrefixStatModel> stat;
    if (!is_ngram) stat.emplace(schema);
    std::size_t order = kDefaultNgramOrder;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_escaped(line, '\t');
        const auto& kind = fields[0];
        if (kind == "task") {
            if (fields.size() != 2 || parse_task(fields[1]) != schema.task)
                throw SchemaMismatch("model task does not match the schema");
        } else if (kind == "order" && is_ngram) {
            if (fields.size() != 2) throw ParseError(line_no, "expected 'order N'");
            order = parse_field<std::size_t>(fields[1], line_no);
        } else if (kind == "count" && is_ngram) {
            if (fields.size() != 4) throw ParseError(line_no, "expected context, label, count");
            if (!ngram) ngram.emplace(schema, order);
            Context ctx;
            if (!fields[1].empty()) ctx = split_escaped(fields[1], '|');
            ngram->add_count(std::move(ctx), fields[2], parse_field<std::size_t>(fields[3], line_no));
        } else if (kind == "global" && !is_ngram) {
            if (fields.size() != 3) throw ParseError(line_no, "expected mean, count");
            stat->set_global(parse_field<double>(fields[1], line_no),
                             parse_field<std::size_t>(fields[2], line_no));
        } else if (kind == "bucket" && !is_ngram) {
            if (fields.size() != 5) throw ParseError(line_no, "expected activity, bucket, mean, count");
            stat->set_bucket(fields[1], parse_field<std::size_t>(fields[2], line_no),
                             parse_field<double>(fields[3], line_no),
                             parse_field<std::size_t>(fields[4], line_no));
        } else {
            throw ParseError(line_no, "unexpected record '" + kind + "'");
        }
    }
    if (is_ngram) {
        if (!ngram) ngram.emplace(schema, order);
        return *std::move(ngram);
    }
    return *std::move(stat);
}

BaselineModel read_model(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_model(in, schema);
}

}  // namespace logsample
