// Prints the closed-form delay budget of a ZigBee hop across payload sizes.

#include <iostream>

#include <medlink/analytics.hpp>
#include <medlink/model.hpp>

int main() {
    using namespace medlink;
    const TechnologyProfile& zigbee = builtin_profiles().at("zigbee");
    const double bo = analytics::expected_bo_slots(zigbee.csma->be_min);

    std::cout << "payload_B,t_bo_s,t_data_s,t_ta_s,t_ack_s,t_ifs_s,total_s\n";
    for (int payload : {0, 16, 40, 60, 100, 256, 512, 1024}) {
        analytics::DelayBreakdown b = analytics::link_delay(zigbee, payload, bo, true);
        std::cout << payload << "," << b.t_bo << "," << b.t_data << "," << b.t_ta << ","
                  << b.t_ack << "," << b.t_ifs << "," << b.total << "\n";
    }
    return 0;
}
