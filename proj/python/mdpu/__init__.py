"""Python bindings for the MDP-with-unawareness library."""

from ._mdpu import (  # noqa: F401
    EXPLORE,
    ContractFault,
    DiscoveryFamily,
    Environment,
    InvalidInput,
    Scenario,
    ScenarioError,
    demo_example1,
    discovery_prob,
    divergence_class,
    impossibility_gap,
    k0,
    k0_details,
    k1_rmax,
    k1_urmax,
    k2_k3,
    lower_bound_steps,
    nondiscovery_product,
    opt_oracle,
    partial_sum,
    plan_finite_horizon,
    run_experiment,
)

__version__ = "0.1.0"
