#include "courtfda/model_io.hpp"

#include "courtfda/error.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>

namespace courtfda::fda {

namespace {

void write_array(std::ostream& out, std::span<const double> values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << values[i];
    }
    out << ']';
}

void write_field(std::ostream& out, const BivariateField& f) {
    out << "{\"missed\":";
    write_array(out, f.missed);
    out << ",\"made\":";
    write_array(out, f.made);
    out << '}';
}

std::vector<double> doubles(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

BivariateField read_field(const nlohmann::json& j, const GridSpec& grid) {
    BivariateField f{grid, doubles(j.at("missed")), doubles(j.at("made"))};
    if (f.missed.size() != grid.node_count() || f.made.size() != grid.node_count()) {
        throw FdaError("model field size does not match its grid");
    }
    return f;
}

}  // namespace

void write_model(std::ostream& out, const MfpcaModel& model) {
    const auto old_precision = out.precision(17);
    out << "{\"format\":\"courtfda-mfpca\",\"version\":1,";
    out << "\"grid\":{\"nx\":" << model.grid.nx << ",\"ny\":" << model.grid.ny << "},";
    out << "\"weights\":{\"wx\":";
    write_array(out, model.weights.wx);
    out << ",\"wy\":";
    write_array(out, model.weights.wy);
    out << "},\"n_samples\":" << model.n_samples;
    out << ",\"numerical_rank\":" << model.numerical_rank;
    out << ",\"total_variance\":" << model.total_variance;
    out << ",\"eigenvalues\":";
    write_array(out, model.eigenvalues());
    out << ",\"variance_ratios\":";
    write_array(out, model.variance_ratios);
    out << ",\"mean\":";
    write_field(out, model.mean);
    out << ",\"eigenfunctions\":[";
    for (std::size_t k = 0; k < model.pairs.size(); ++k) {
        if (k) out << ',';
        write_field(out, model.pairs[k].eigenfunction);
    }
    out << "],\"training_scores\":[";
    for (std::size_t i = 0; i < model.training_scores.rows(); ++i) {
        if (i) out << ',';
        write_array(out, model.training_scores.row(i));
    }
    out << "]}\n";
    out.precision(old_precision);
}

MfpcaModel read_model(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
        if (!j.is_object() || j.value("format", "") != "courtfda-mfpca") {
            throw FdaError("not an MFPCA model document");
        }
        MfpcaModel m;
        m.grid = GridSpec{j.at("grid").at("nx").get<std::size_t>(),
                          j.at("grid").at("ny").get<std::size_t>()};
        m.grid.validate();
        m.weights = QuadratureWeights{doubles(j.at("weights").at("wx")),
                                      doubles(j.at("weights").at("wy"))};
        m.n_samples = j.at("n_samples").get<std::size_t>();
        m.numerical_rank = j.at("numerical_rank").get<std::size_t>();
        m.total_variance = j.at("total_variance").get<double>();
        m.variance_ratios = doubles(j.at("variance_ratios"));
        m.mean = read_field(j.at("mean"), m.grid);
        const auto values = doubles(j.at("eigenvalues"));
        const auto& functions = j.at("eigenfunctions");
        if (functions.size() != values.size() || m.variance_ratios.size() != values.size()) {
            throw FdaError("model component counts disagree");
        }
        for (std::size_t k = 0; k < values.size(); ++k) {
            m.pairs.push_back({values[k], read_field(functions[k], m.grid)});
        }
        const auto& scores = j.at("training_scores");
        m.training_scores = ScoreMatrix(scores.size(), values.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto row = doubles(scores[i]);
            if (row.size() != values.size()) throw FdaError("training score row has wrong length");
            for (std::size_t k = 0; k < row.size(); ++k) m.training_scores(i, k) = row[k];
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FdaError(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const std::string& path, const MfpcaModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FdaError("cannot write model to '" + path + "'");
    write_model(out, model);
}

MfpcaModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FdaError("cannot open model '" + path + "'");
    return read_model(in);
}

}  // namespace courtfda::fda
