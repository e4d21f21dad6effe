/*
   Copyright 2026 The ccdetect Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "ccd/projection.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "ccd/errors.hpp"
#include "ccd/kernels.hpp"

namespace ccd {

ProjectionOperator ProjectionOperator::from_matrix(Eigen::MatrixXd phi)
{
    if (phi.rows() == 0 || phi.cols() == 0) throw DimensionError("projection matrix is empty");
    if (phi.rows() > phi.cols())
        throw DimensionError("projection matrix has more rows than columns");
    if (!phi.allFinite()) throw RankError("projection matrix has non-finite entries");

    ProjectionOperator op;
    op.gram_ = phi * phi.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.gram_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition)
        throw RankError("phi phi^T is singular or ill-conditioned (condition " + std::to_string(hi / lo) + ")");

    Eigen::LLT<Eigen::MatrixXd> llt(op.gram_);
    if (llt.info() != Eigen::Success) throw RankError("Cholesky factorization of phi phi^T failed");

    const auto M = phi.rows();
    op.lower_ = llt.matrixL();
    op.lower_rm_ = op.lower_;
    op.gram_inverse_ = llt.solve(Eigen::MatrixXd::Identity(M, M));
    op.gram_inverse_ = 0.5 * (op.gram_inverse_ + op.gram_inverse_.transpose()).eval();
    op.projector_ = phi.transpose() * llt.solve(phi);
    op.projector_ = 0.5 * (op.projector_ + op.projector_.transpose()).eval();
    op.log_det_gram_ = 2.0 * op.lower_.diagonal().array().log().sum();
    op.phi_rm_ = phi;
    op.phi_ = std::move(phi);
    return op;
}

void ProjectionOperator::apply(std::span<const double> u, std::span<double> y) const
{
    if (u.size() != cols() || y.size() != rows()) throw DimensionError("apply: dimension mismatch");
    kernels::gemv(phi_row_major(), rows(), cols(), u, y);
}

void ProjectionOperator::whiten(std::span<const double> y, std::span<double> z) const
{
    const std::size_t M = rows();
    if (y.size() != M || z.size() != M) throw DimensionError("whiten: dimension mismatch");
    const double* L = lower_rm_.data();
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < M; ++i) {
        const double* row = L + i * M;
        z[i] = (y[i] - k.dot(row, z.data(), i)) / row[i];
    }
}

Eigen::VectorXd ProjectionOperator::whiten(const Eigen::VectorXd& y) const
{
    Eigen::VectorXd z(rows());
    whiten({y.data(), static_cast<std::size_t>(y.size())}, {z.data(), rows()});
    return z;
}

double ProjectionOperator::projected_energy(const Eigen::VectorXd& x) const
{
    if (static_cast<std::size_t>(x.size()) != cols()) throw DimensionError("projected_energy: dimension mismatch");
    Eigen::VectorXd y(rows());
    apply({x.data(), cols()}, {y.data(), rows()});
    return whiten(y).squaredNorm();
}

ProjectionOperator gen_projection(std::size_t M, std::size_t P, const MatrixSource& source)
{
    if (M == 0 || P == 0 || M > P)
        throw DimensionError("gen_projection requires 1 <= M <= P (M = " + std::to_string(M) +
                             ", P = " + std::to_string(P) + ")");
    std::string last;
    for (unsigned attempt = 0; attempt < kMaxProjectionAttempts; ++attempt) {
        Eigen::MatrixXd phi = source(attempt);
        if (static_cast<std::size_t>(phi.rows()) != M || static_cast<std::size_t>(phi.cols()) != P)
            throw DimensionError("matrix source returned the wrong shape");
        try {
            return ProjectionOperator::from_matrix(std::move(phi));
        } catch (const RankError& e) {
            last = e.what();
        }
    }
    throw RankError(std::to_string(kMaxProjectionAttempts) + " consecutive rank-deficient draws: " + last);
}

ProjectionOperator gen_projection(std::size_t M, std::size_t P, const RngContract& rng)
{
    return gen_projection(M, P, [&](unsigned attempt) {
        // Attempt 0 uses the contract itself; retries step to neighbouring
        // substreams reserved by projection_stream.
        RngContract c = rng;
        c.substream_id = rng.substream_id + attempt;
        Engine engine = make_engine(c);
        Eigen::MatrixXd phi(M, P);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index r = 0; r < phi.rows(); ++r)
            for (Eigen::Index col = 0; col < phi.cols(); ++col) phi(r, col) = normal(engine);
        return phi;
    });
}

double embedding_distortion(const ProjectionOperator& op, const Eigen::VectorXd& x)
{
    if (static_cast<std::size_t>(x.size()) != op.cols()) throw DimensionError("embedding_distortion: dimension mismatch");
    const double norm2 = x.squaredNorm();
    if (!(norm2 > 0.0)) throw ZeroVectorError("embedding distortion is undefined for the zero vector");
    const double ratio = static_cast<double>(op.cols()) / static_cast<double>(op.rows());
    return ratio * (op.projector() * x).squaredNorm() / norm2;
}

StableEmbeddingReport check_stable_embedding(const ProjectionOperator& op,
                                             std::span<const Eigen::VectorXd> xs, double eps)
{
    if (xs.empty()) throw DimensionError("check_stable_embedding needs at least one vector");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
    StableEmbeddingReport report;
    std::size_t pass = 0;
    double worst_gap = -1.0;
    for (const auto& x : xs) {
        const double rho = embedding_distortion(op, x);
        if (rho >= 1.0 - eps && rho <= 1.0 + eps) ++pass;
        if (std::abs(rho - 1.0) > worst_gap) {
            worst_gap = std::abs(rho - 1.0);
            report.worst_distortion = rho;
        }
    }
    report.count = xs.size();
    report.pass_fraction = static_cast<double>(pass) / static_cast<double>(xs.size());
    return report;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << m(r, c);
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw Error("bad number '" + tok + "' in " + path.string());
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionError("ragged rows in matrix file " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DimensionError("matrix file " + path.string() + " is empty");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

}  // namespace ccd
