#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tiltkde {

struct MixtureComponent {
    double weight;
    double mean;
    double stddev;
};

//! Gaussian-mixture reference density: analytically known pdf, derivatives of
//! every order, and cdf. Serves as simulation ground truth.
class ReferenceDensity {
public:
    ReferenceDensity(std::string name, std::vector<MixtureComponent> components);

    static ReferenceDensity normal();  //!< N(0,1)
    static ReferenceDensity bimodal(); //!< 1/2 N(-1.5, 0.75^2) + 1/2 N(1.5, 0.75^2)
    static ReferenceDensity claw();    //!< 1/2 N(0,1) + 1/4 N(-1, 0.3^2) + 1/4 N(1, 0.3^2)
    static ReferenceDensity by_name(std::string_view name);
    static const std::vector<std::string>& names();

    const std::string& name() const { return name_; }
    const std::vector<MixtureComponent>& components() const { return components_; }

    double pdf(double x) const;
    //! f^{(s)}(x) via the Hermite closed form per component; s = 0 agrees with pdf.
    double derivative(int s, double x) const;
    double cdf(double x) const;

private:
    std::string name_;
    std::vector<MixtureComponent> components_;
};

//! Reproducible sampler: draw i of stream (seed, stream_id) is a pure function
//! of (seed, stream_id, i), so samples are identical regardless of how
//! replications are scheduled across workers.
class SeededSampler {
public:
    SeededSampler(ReferenceDensity density, std::uint64_t seed, std::uint64_t stream_id)
        : density_(std::move(density)), seed_(seed), stream_id_(stream_id) {}

    const ReferenceDensity& density() const { return density_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    //! n draws, sorted ascending. Requires n >= 1.
    std::vector<double> sample(std::size_t n) const;

private:
    ReferenceDensity density_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

} // namespace tiltkde
