#include "smc/cluster.hpp"
#include "smc/error.hpp"

namespace smc {

std::string display_name(Algorithm a) {
  switch (a) {
    case Algorithm::Gmm: return "GMM";
    case Algorithm::KMeans: return "K-Means";
    case Algorithm::KMedoids: return "K-Medoids";
    case Algorithm::Agglomerative: return "AC";
    case Algorithm::Birch: return "Birch";
    case Algorithm::Spectral: return "SC";
  }
  return "?";
}

std::string key_name(Algorithm a) {
  switch (a) {
    case Algorithm::Gmm: return "gmm";
    case Algorithm::KMeans: return "kmeans";
    case Algorithm::KMedoids: return "kmedoids";
    case Algorithm::Agglomerative: return "ac";
    case Algorithm::Birch: return "birch";
    case Algorithm::Spectral: return "sc";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  for (Algorithm a : kSingleViewAlgorithms) {
    if (text == key_name(a) || text == display_name(a)) return a;
  }
  if (text == "k-means") return Algorithm::KMeans;
  if (text == "k-medoids") return Algorithm::KMedoids;
  if (text == "agglomerative") return Algorithm::Agglomerative;
  if (text == "spectral") return Algorithm::Spectral;
  fail(ErrorCode::InvalidInput, "unknown clustering algorithm '" + text + "'");
}

ClusterAssignment run_algorithm(Algorithm a, const Eigen::MatrixXd& X, int k,
                                const AlgorithmOptions& opts, std::uint64_t seed) {
  ClusterAssignment out;
  switch (a) {
    case Algorithm::Gmm: {
      GmmOptions o = opts.gmm;
      o.seed = seed;
      out = gmm(X, k, o);
      break;
    }
    case Algorithm::KMeans: {
      KMeansOptions o = opts.kmeans;
      o.seed = seed;
      out = kmeans(X, k, o);
      break;
    }
    case Algorithm::KMedoids: {
      KMedoidsOptions o = opts.kmedoids;
      o.seed = seed;
      out = kmedoids(X, k, o);
      break;
    }
    case Algorithm::Agglomerative:
      out = agglomerative(X, k);
      break;
    case Algorithm::Birch:
      out = birch(X, k, opts.birch);
      break;
    case Algorithm::Spectral: {
      SpectralOptions o = opts.spectral;
      o.seed = seed;
      out = spectral(X, k, o);
      break;
    }
  }
  out.seed = seed;
  return out;
}

}  // namespace smc
