#pragma once

#include "abacus/model.hpp"

#include <vector>

namespace abacus::eval {

struct PrecisionRecall
{
  double precision = 1.0;
  double recall = 1.0;
  std::size_t matches = 0;
};

//! Largest one-to-one matching between sorted index lists with |t - e| <= w.
//! With equal windows on a line, a single left-to-right sweep is optimal.
std::size_t
count_matches(const std::vector<Index>& truth,
              const std::vector<Index>& est,
              Index w);

//! precision = matches / |est| (1 when est is empty),
//! recall = matches / |truth| (1 when truth is empty).
PrecisionRecall
precision_recall(const std::vector<Index>& truth,
                 const std::vector<Index>& est,
                 Index w);

//! (1/P^2) Tr(M M' - M_hat M_hat') after centering each row and scaling it to
//! unit Euclidean norm (constant rows become zero).
double
epsilon_M(const MatrixXd& M, const MatrixXd& M_hat);

//! (1/P^2) ||M M' - M_hat M_hat'||_F^2 with the same row standardization.
double
epsilon_M_frobenius(const MatrixXd& M, const MatrixXd& M_hat);

//! Pearson correlation; 0 when either side is constant.
double
pearson(const VectorXd& a, const VectorXd& b);

//! (1/r) sum (1 - |rho_i|) over rows of S paired greedily with rows of S_hat
//! by descending |rho|, without reuse. Throws when S_hat has fewer rows.
double
epsilon_S(const MatrixXd& S, const MatrixXd& S_hat);

//! (1/P) ||psi - psi_hat||^2.
double
epsilon_E(const VectorXd& psi, const VectorXd& psi_hat);

//! |A matched B| / (|A| + |B| - matched), matching within w; 1 for two
//! empty sets.
double
jaccard(const std::vector<Index>& a, const std::vector<Index>& b, Index w);

} // namespace abacus::eval
