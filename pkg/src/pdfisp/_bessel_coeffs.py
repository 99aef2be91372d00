"""Chebyshev coefficients for the Bessel evaluators.

Generated by tools/gen_bessel_coeffs.py; do not edit by hand.
"""

SPLIT = 17.0

J0_INNER = (
    0.001758900845145085,
    -0.14919121408234226,
    0.0009967879972893195,
    -0.13793454105724212,
    0.08627931402110942,
    -0.00901368458169949,
    0.16437188408240547,
    -0.22793802138098088,
    0.1451037656342676,
    -0.05741128476062147,
    0.01599647249511011,
    -0.003362469152815453,
    0.0005572585510909242,
    -7.510561664002562e-05,
    8.424563741232462e-06,
    -8.007733859952914e-07,
    6.54425778140669e-08,
    -4.65371061216434e-09,
    2.908720914377572e-10,
    -1.6117933898755815e-11,
    7.977411280358097e-13,
    -3.5497543824553845e-14,
    1.42832779117989e-15,
    -5.223812263458004e-17,
    1.7445570755605793e-18,
    -5.34237391390305e-20,
)

J1_INNER = (
    0.03817725394315811,
    -0.07365932416434846,
    0.07222464728888114,
    -0.07360413866968885,
    0.060769875713193214,
    -0.0640507198161404,
    0.05952230691295799,
    -0.036750199276502124,
    0.015354385814913253,
    -0.004616493392096841,
    0.001051228365900292,
    -0.000188404120094043,
    2.7362326288666147e-05,
    -3.2940131572654143e-06,
    3.346995393143661e-07,
    -2.9130323292972478e-08,
    2.198479385525368e-09,
    -1.453753338009772e-10,
    8.49792097744358e-12,
    -4.4252699462063876e-13,
    2.0668546264050648e-14,
    -8.710067807440914e-16,
    3.329587469062581e-17,
    -1.1600982262344784e-18,
    3.700076411118139e-20,
)

Y0_INNER = (
    0.10694722874818474,
    0.021459215451057185,
    0.18314122872703378,
    -0.07239370810381884,
    0.0029075434550603703,
    -0.23557533992713311,
    0.10497371993520602,
    0.10561634133970871,
    -0.12436655938514642,
    0.06191210786032544,
    -0.01966886584219724,
    0.004519704702053219,
    -0.0008005736254299311,
    0.00011373747321270498,
    -1.3324406813448811e-05,
    1.3140742093126182e-06,
    -1.1087886440816448e-07,
    8.109968124255633e-09,
    -5.198102128548424e-10,
    2.946534235941667e-11,
    -1.4888208849648057e-12,
    6.751740997216211e-14,
    -2.7647136193809284e-15,
    1.0277069126922124e-16,
    -3.4845864087715215e-18,
    1.0823485451144944e-19,
    -3.0918028071149178e-21,
)

Y1_INNER = (
    0.024233367608307393,
    -0.033594168797809895,
    0.032783641306948386,
    -0.008501099883105812,
    0.013042116992419292,
    0.003574806793166282,
    -0.030477770923328287,
    0.030396432545541887,
    -0.015942086493115067,
    0.005497814565990756,
    -0.0013759518823263071,
    0.0002646598157937561,
    -4.0645275708467024e-05,
    5.1229015807422625e-06,
    -5.411251532209839e-07,
    4.870186748408843e-08,
    -3.785405018010428e-09,
    2.5696230693919445e-10,
    -1.537958694911848e-11,
    8.182523027612059e-13,
    -3.8974984901765154e-14,
    1.6724641395222988e-15,
    -6.501432373294897e-17,
    2.3008915325106344e-18,
    -7.446563034309499e-20,
)

P0_OUTER = (
    0.9998788484403285,
    -0.00012098728085327015,
    1.6358177155253638e-07,
    -6.910836553742478e-10,
    5.879083991316124e-12,
    -8.219655016079471e-14,
    1.6782247320833913e-15,
    -4.63123984778245e-17,
    1.6358695421755931e-18,
    -7.104683211352221e-20,
)

Q0_OUTER = (
    -0.007345545978154618,
    7.375830941120425e-06,
    -1.9246036606095558e-08,
    1.1997354548762959e-10,
    -1.3410383194832982e-12,
    2.308456356776343e-14,
    -5.566431558227986e-16,
    1.762560670013122e-17,
    -6.994248320789873e-19,
    3.358211690512229e-20,
)

P1_OUTER = (
    1.000202107621235,
    0.00020189604087456019,
    -2.1075452868861618e-07,
    8.190520812771285e-10,
    -6.686566708996101e-12,
    9.122891598202428e-14,
    -1.8328407647876093e-15,
    5.000531196315499e-17,
    -1.7513885744156855e-18,
    7.556729835310681e-20,
)

Q1_OUTER = (
    0.02204845989744963,
    -1.0339918970889937e-05,
    2.357263566245475e-08,
    -1.3882547313002531e-10,
    1.504097768611208e-12,
    -2.5387977729465795e-14,
    6.040033275000696e-16,
    -1.8939190658868797e-17,
    7.4600133978767415e-19,
    -3.561099851707792e-20,
)
