"""Reference values of ``(m11, m12, m22)`` at ``X = 10``, ``M = 6`` and of ``eps(X)``.

For ``lambda = 0.01i`` the second and third printed rows come in the order
``m22, m12``; the tuples below are already in ``(m11, m12, m22)`` order.
"""

M_VALUES = {
    1.0: {
        1j: (-0.1844321489 + 1.8220405579j, -0.6613801122 + 1.1030735970j, -1.4291142225 + 0.8401392698j),
        0.5 + 1j: (0.1935073882 + 2.0560526848j, -0.5871452689 + 1.2561461926j, -1.4407042265 + 0.9327853918j),
        10 + 10j: (2.0868480206 + 10.2971620560j, -1.4532939196 + 3.5441000462j, -2.3046081066 + 1.5476453304j),
        1 + 0.001j: (1.0726006031 + 1.6053582430j, -0.2162801623 + 1.3155398369j, -1.2967267036 + 1.0783087015j),
        0.01j: (0.3271814883 + 1.0330723524j, -0.3127440214 + 0.9515559077j, -1.2149009705 + 0.8802024126j),
    },
    0.5: {
        1j: (0.0091688652 + 1.8079411983j, -0.5696548223 + 1.1018460989j, -1.3599216938 + 0.8523176312j),
        0.5 + 1j: (0.3899112046 + 2.0596635342j, -0.4997293651 + 1.2700277567j, -1.3820117712 + 0.9563996792j),
        10 + 10j: (2.2008070946 + 10.3476095200j, -1.4308696985 + 3.5664336681j, -2.2991588116 + 1.5578293800j),
        1 + 0.001j: (1.2971330881 + 1.6384627819j, -0.1199851707 + 1.3626530170j, -1.2458260059 + 1.1335541010j),
        0.01j: (0.5758281350 + 1.0167049170j, -0.1757378578 + 0.9719497561j, -1.1166948080 + 0.9334350824j),
    },
    4 / 3: {
        1j: (-0.2790325582 + 1.8323447704j, -0.7153936028 + 1.1025729179j, -1.4712435007 + 0.8293465972j),
        0.5 + 1j: (0.0974698886 + 2.0557093620j, -0.6384261250 + 1.2467917204j, -1.4768083096 + 0.9157238603j),
        10 + 10j: (2.0430564880 + 10.2711343765j, -1.4629243612 + 3.5318126678j, -2.3070857525 + 1.5415457487j),
        1 + 0.001j: (0.9584534168 + 1.5867842436j, -0.2741018832 + 1.2855821848j, -1.3294038773 + 1.0418083668j),
        0.01j: (0.2010058761 + 1.0459299088j, -0.3926285803 + 0.9405522943j, -1.2738007307 + 0.8492208123j),
    },
}

# (alpha, X) -> eps at M = 6
EPS_VALUES = {
    (1.0, 10.0): 2.036696e-6,
    (1.0, 20.0): 1.038152e-8,
    (4 / 3, 10.0): 6.57898e-6,
    (0.5, 10.0): 1.452392e-6,
}


def entries(M) -> tuple:
    """``(m11, m12, m22)`` of a 2 x 2 array."""
    return complex(M[0, 0]), complex(M[0, 1]), complex(M[1, 1])
