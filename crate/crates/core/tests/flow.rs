mod common;

use hfc_core::{Dinic, Side};
use hfc_oracles::lawler_cutsides;

#[test]
fn dinic_matches_lawler_network() {
    let mut rng = common::rng(7);
    let mut checked = 0;
    while checked < 500 {
        let Some(mut fh) = common::random_flow_problem(&mut rng, 30, 40) else { continue };
        let (expected, s_reach, t_reach) = lawler_cutsides(&fh);
        let mut dinic = Dinic::new(&fh);
        let flow = dinic.exhaust_flow(&mut fh);
        assert_eq!(flow, expected);
        assert_eq!(fh.flow_value(), expected);
        fh.audit().unwrap();
        let s = dinic.compute_reachable(&fh, Side::Source);
        let t = dinic.compute_reachable(&fh, Side::Target);
        assert_eq!(s.cut_weight, flow);
        assert_eq!(t.cut_weight, flow);
        assert_eq!(s.reached, s_reach);
        assert_eq!(t.reached, t_reach);
        checked += 1;
    }
}
