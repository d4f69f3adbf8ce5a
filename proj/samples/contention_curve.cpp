// Expected backoff delay versus contending device count: the exact model
// expectation next to a short simulated run.

#include <iostream>

#include <medlink/analytics.hpp>
#include <medlink/linksim.hpp>
#include <medlink/model.hpp>

int main() {
    using namespace medlink;

    TechnologyProfile link;
    link.id = "lab";
    link.data_rate = 134217728.0;  // frames finish well inside one backoff slot
    link.phy_header = 6;
    link.mac_header = 9;
    link.mac_footer = 2;
    link.mac_kind = MacKind::contention;
    CsmaParams c;
    c.be_min = c.be_max = 3;
    c.max_backoffs = 1000;
    c.max_retries = 1000;
    c.slot_duration = 0x1p-12;
    c.cca_duration = 0x1p-20;
    c.turnaround = 0x1p-20;
    c.sifs = 0x1p-20;
    c.lifs = 0x1p-19;
    link.csma = c;

    TrafficSpec traffic{32, 0.03125, 4000};
    std::cout << "devices,expected_bo_s,simulated_mean_bo_s\n";
    for (int d = 1; d <= 5; ++d) {
        const double expected =
            analytics::expected_time_delay_corrected(*link.csma, ContentionConfig{d});
        sim::LinkSampleSet s = sim::simulate_csma_link(link, traffic, ContentionConfig{d}, 1);
        double mean = 0.0;
        for (const auto& b : s.samples) mean += b.t_bo;
        mean /= static_cast<double>(s.samples.size());
        std::cout << d << "," << expected << "," << mean << "\n";
    }
    return 0;
}
