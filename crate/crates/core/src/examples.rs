//! Ready-made systems used by tests, benchmarks and the command line docs.

use crate::statespace::{mat, CtStateSpace};

/// `F(s) = 1/(s + 1)`.
pub fn first_order() -> CtStateSpace {
    CtStateSpace::new(mat(1, 1, &[-1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0]))
        .expect("valid realization")
}

/// A stable plant with four states, three inputs and two outputs.
pub fn four_state_plant() -> CtStateSpace {
    let a = mat(
        4,
        4,
        &[
            -1.8396, 0.1240, -1.2078, -1.0582, //
            1.3546, 0.4367, 2.9080, -0.4686, //
            -1.0722, -1.9609, -0.1748, -0.2725, //
            0.9610, -0.1977, 1.3790, 0.0984,
        ],
    );
    let b = mat(
        4,
        3,
        &[
            -0.2779, -0.8236, 0.0335, //
            0.7015, -1.5771, -1.3337, //
            -2.0518, 0.5080, 1.1275, //
            -0.3538, 0.2820, 0.3502,
        ],
    );
    let c = mat(
        2,
        4,
        &[
            -0.2991, -0.2620, -0.2857, -0.9792, //
            0.0229, -1.7502, -0.8314, -1.1564,
        ],
    );
    let d = mat(2, 3, &[-0.5336, 0.9642, -0.0200, -2.0026, 0.5201, -0.0348]);
    CtStateSpace::new(a, b, c, d).expect("valid realization")
}
