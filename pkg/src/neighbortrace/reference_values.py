"""Reference values for the ``SO_7`` reproduction tables.

Weights are the odd triples ``(w_1, w_2, w_3) = (2 m_1 + 5, 2 m_2 + 3, 2 m_3 + 1)``.
"""

# det(2^(w_1/2) X - c_2(pi)) for a single cuspidal pi: coefficients of X, X^2, X^3
CHARPOLY_P2: dict[tuple[int, int, int], tuple[int, int, int]] = {
    (23, 13, 5): (0, -4472832, -14948499456),
    (23, 15, 3): (3360, 7139328, 17641242624),
    (23, 15, 7): (720, -4288512, 528482304),
    (23, 17, 5): (-1920, 7323648, -22246588416),
    (23, 17, 9): (-1584, -417792, 5190451200),
    (23, 19, 3): (96, 872448, -8241807360),
    (23, 19, 11): (96, -4288512, -6259998720),
    (25, 13, 3): (8640, 16023552, -56170119168),
    (25, 13, 7): (-5040, 5332992, 1962934272),
    (25, 15, 5): (0, 21331968, -119587995648),
    (25, 15, 9): (6048, -23052288, -335208775680),
    (25, 17, 11): (-6432, -11071488, 185377751040),
    (25, 19, 1): (10752, 72425472, 443421818880),
    (25, 19, 13): (-672, -3053568, -173801472000),
    (25, 21, 15): (-672, -14020608, -106419978240),
}

# X^2 + b X + c with roots 2^(w_1/2) Trace(c_2(pi) | St) for two cuspidal pi: (b, c)
PAIR_POLY_P2: dict[tuple[int, int, int], tuple[int, int]] = {
    (25, 17, 3): (768, -2764800),
    (25, 17, 7): (-5232, -23063040),
    (25, 19, 5): (-6624, -38854656),
    (25, 19, 9): (1104, -35306496),
    (25, 21, 3): (-2880, -8193024),
    (25, 21, 7): (240, -28491264),
    (25, 21, 11): (1824, -42771456),
}

# p^(w_1/2) * sum over the cuspidal pi of Trace(c_p(pi) | St), by odd prime p
TRACE_SUMS_ODD: dict[tuple[int, int, int], dict[int, int]] = {
    (23, 13, 5): {3: -304668, 5: 874314, 7: 452588136, 11: -1090903017204, 13: 1624277793138, 17: 126454166788950, 19: -119149415901516},
    (23, 15, 3): {3: -47628, 5: 83069994, 7: -4690439544, 11: -412279403844, 13: 8898668260818, 17: -106699425426090, 19: -312437470082556},
    (23, 15, 7): {3: 425412, 5: -124558326, 7: -3040958424, 11: 352045171116, 13: -4816260369102, 17: 99848197859670, 19: 129801738947604},
    (23, 17, 5): {3: -37548, 5: 9957354, 7: -3491256504, 11: 1417257011676, 13: -5403644192622, 17: -1644876121770, 19: -824110968459036},
    (23, 17, 9): {3: 161028, 5: 118413450, 7: -3221005656, 11: -1654692256404, 13: -5869020263502, 17: -8093664534186, 19: 676095496191060},
    (23, 19, 3): {3: -201852, 5: -26872950, 7: 4686149544, 11: 465927593196, 13: -7534226506062, 17: -90400042234026, 19: 392917842132180},
    (23, 19, 11): {3: -252252, 5: 26651850, 7: 6781882344, 11: 25215729996, 13: 2875236177138, 17: -128845421894826, 19: -41596411782540},
    (25, 13, 3): {3: -19764, 5: -391988430, 7: 9750417432, 11: 13078424975076, 13: -96701634737526, 17: 2452876322679990, 19: -2642714743857924},
    (25, 13, 7): {3: -112644, 5: -559352430, 7: -1243505928, 11: 7826821995636, 13: 107438724171114, 17: -2831213421327690, 19: -9749582433259284},
    (25, 15, 5): {3: 867132, 5: -613050606, 7: 5377223544, 11: -3134062555596, 13: 51842671522026, 17: 814881989695158, 19: -2965210972182228},
    (25, 15, 9): {3: -278964, 5: 533148210, 7: -7056168168, 11: 2683226030436, 13: -15864469792374, 17: 968124970032822, 19: -2966903818822020},
    (25, 17, 3): {3: -1478088, 5: 884141220, 7: -9475591056, 11: 1338439935912, 13: -114003342180780, 17: 827431528322412, 19: 9018803395859736},
    (25, 17, 7): {3: 1265112, 5: 626270820, 7: -13034888016, 11: -3063060887928, 13: -34174702764780, 17: 2038338006384492, 19: 1506984152124216},
    (25, 17, 11): {3: 872316, 5: -474730350, 7: -9663808008, 11: 6996289229556, 13: -123888344826774, 17: 197426191828662, 19: -8092805263108500},
    (25, 19, 1): {3: -106596, 5: 353216850, 7: -17012565192, 11: 10854722172756, 13: 24295975183914, 17: -2237898756283722, 19: -1116669445539060},
    (25, 19, 5): {3: 90072, 5: -334979100, 7: -31105966416, 11: -7883875892088, 13: -105638103433068, 17: -2537945828699796, 19: 10159571243517240},
    (25, 19, 9): {3: -573192, 5: 927204900, 7: 62961605616, 11: -3096943985688, 13: -15467475516972, 17: -508393328631444, 19: 821432168707800},
    (25, 19, 13): {3: -702324, 5: 9404850, 7: -14719266408, 11: 23152557649956, 13: -10567857144054, 17: 3351056484428982, 19: -4267132336471620},
    (25, 21, 3): {3: -170280, 5: -823542300, 7: 4910286000, 11: -1405391636088, 13: 145190225249940, 17: -842678842445460, 19: -6403875311384520},
    (25, 21, 7): {3: -108360, 5: 433601700, 7: 43209490800, 11: 12737766447912, 13: -109920761915820, 17: -1119504013993620, 19: 9538661136172440},
    (25, 21, 11): {3: 511128, 5: -401727900, 7: 28143226416, 11: 9867684455112, 13: 90846882696468, 17: 2611978425209196, 19: 3887087995313400},
    (25, 21, 15): {3: 411516, 5: -439386990, 7: 18155978232, 11: -3315674449164, 13: -10179464734614, 17: 657746166515382, 19: 19498517165502060},
}

# T_p eigenvalues on the one-dimensional spaces of the two smallest weights, keyed by
# lambda: level-one cusp form coefficients tau_k(p) enter through (k, factor) pairs
# with factor(p) = the multiplier of tau_k(p), plus an Eisenstein correction
ENDOSCOPIC_LIFTS: dict[tuple[int, int, int], tuple[int, tuple[int, ...], tuple[int, ...]]] = {
    # lambda: (k, coefficients of 1, p, p^2, ... multiplying tau_k(p),
    #          coefficients of p^0, p^1, ... of the additive Eisenstein term)
    (4, 4, 4): (12, (1, 1, 1), ()),
    (6, 0, 0): (18, (1,), (0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1)),
}
