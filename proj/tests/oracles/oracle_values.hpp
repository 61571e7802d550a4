#pragma once

#include <complex>

// Frozen by tests/oracles/direct_series.py: raw-argument q-series, 61 terms, 40 digits.
namespace rw::oracle {

struct SeriesValue {
    const char* function;
    std::complex<double> u;
    std::complex<double> lambda;
    std::complex<double> tau;
    std::complex<double> value;
};

inline constexpr SeriesValue kSeriesValues[] = {
    {"theta1", {0.5, 0.0}, {0, 0}, {0.0, 1.0}, {0.91357913815611682141, 0.0}},
    {"theta1", {0.23, 0.11}, {0, 0}, {0.0, 1.0}, {0.63716665019215361878, 0.24228914995371165544}},
    {"theta1", {1.37, -0.62}, {0, 0}, {0.3, 1.2}, {-2.7811566401865922563, 0.38072866532211961641}},
    {"theta1_d1", {0.0, 0.0}, {0, 0}, {0.0, 1.0}, {2.8486946039877873161, 0.0}},
    {"theta1_d1", {0.41, 0.77}, {0, 0}, {0.3, 1.2}, {7.2953587399626829721, -9.1110202484485789604}},
    {"rho", {0.31, 0.27}, {0, 0}, {0.3, 1.2}, {0.91725346426942270538, -2.5793083613459140598}},
    {"rho", {-2.2, 1.9}, {0, 0}, {0.0, 1.0}, {-3.3654972511559535666, -10.217560613084973987}},
    {"s", {0.37, 0.12}, {0.21, 0.08}, {0.0, 1.0}, {-2.2809872392195822426, 0.56218006799093382009}},
    {"s", {-0.8, 2.3}, {0.15, -0.33}, {0.3, 1.2}, {182.91614430878408056, -49.823861893762169844}},
};

}  // namespace rw::oracle
