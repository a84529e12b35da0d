"""Reference measurement plans and stabilizer lists for the named states.

Strings are in the qubit order of the corresponding named state.  Keys are
measured settings; values are the signed operators derived from them.
"""

STAR4_PLAN = {
    "XZZZ": ["XZZZ", "IIII"],
    "ZXXX": ["ZXII", "ZIXI", "ZIIX", "IXXI", "IXIX", "IIXX", "ZXXX"],
    "YYZZ": ["YYZZ"],
    "YZYZ": ["YZYZ"],
    "YZZY": ["YZZY"],
    "XYYZ": ["-XYYZ"],
    "XZYY": ["-XZYY"],
    "XYZY": ["-XYZY"],
    "YYYY": ["-YYYY"],
}

STAR4_GENERATORS = ["XZZZ", "ZXII", "ZIXI", "ZIIX"]

# five-qubit line, order (4, 3, 1, 7, 8)
L5_PLAN = {
    "XZXZX": ["IZXZI", "XZIII", "IIIZX", "XIXZI", "IZXIX", "XZIZX", "XIXIX", "IIIII"],
    "ZXZXZ": ["ZXZII", "IIZXZ", "ZXIXZ"],
    "YYZYY": ["YYZII", "IIZYY", "YYIYY"],
    "ZYYZX": ["ZYYIX", "ZYYZI"],
    "XZYYZ": ["IZYYZ", "XIYYZ"],
    "YXYZX": ["-YXYZI", "-YXYIX"],
    "XZYXY": ["-IZYXY", "-XIYXY"],
    "ZXZZX": ["ZXZZX"],
    "XZZXZ": ["XZZXZ"],
    "ZYXYZ": ["-ZYXYZ"],
    "YYIXZ": ["YYIXZ"],
    "YYZZX": ["YYZZX"],
    "XZZYY": ["XZZYY"],
    "ZXIYY": ["ZXIYY"],
    "ZYXXY": ["ZYXXY"],
    "YXXYZ": ["YXXYZ"],
    "YXXXY": ["-YXXXY"],
}

# four- and three-qubit lines, orders (4, 3, 1, 7) and (4, 3, 1)
L4_PLAN = {
    "ZXZX": ["ZXZI", "IIZX", "ZXIX", "IIII"],
    "XZYY": ["IZYY", "XIYY"],
    "XZZX": ["XZZX"],
    "ZYXY": ["-ZYXY"],
    "YXXY": ["YXXY"],
    "XZXZ": ["IZXZ", "XZII", "XIXZ"],
    "ZYYZ": ["ZYYZ"],
    "YYZX": ["YYZI", "YYIX"],
    "YXYZ": ["-YXYZ"],
}

# The source lists "-YZY" for the YXY setting; the group element is -YXY.
L3_PLAN = {
    "XZX": ["IZX", "XZI", "XIX", "III"],
    "ZYY": ["ZYY"],
    "YXY": ["-YXY"],
    "ZXZ": ["ZXZ"],
    "YYZ": ["YYZ"],
}

# branched states, orders (1..7) and (1, 3, 4)
B7_GENERATORS = ["XIZZIII", "IXZZIII", "ZZXIZZZ", "ZZIXZZZ", "IIZZXII", "IIZZIXI", "IIZZIIX"]
B3_GENERATORS = ["XZZ", "ZXI", "ZIX"]
# The B5 column of the source table lists six-letter strings; these are the
# six-qubit branched (crazy6) generators and are kept here under that name.
B6_GENERATORS = ["XIZZII", "IXZZII", "ZZXIZZ", "ZZIXZZ", "IIZZXI", "IIZZIX"]

# crazy6 plan; each entry is (setting, entangled pairs, derived operators).
# Entangled pairs are measured in the Bell basis and give access to
# II, XX, YY and ZZ on that pair.  Signs are as printed in the source, which
# omits the minus sign on the operators in CRAZY6_SIGN_ERRATA; "ZZXIZZ" is
# printed there as "ZXIZZ".
CRAZY6_PLAN = [
    ("XXZZXX", (), ["XIZZII", "IXZZII", "IIZZXI", "IIZZIX", "XXIIII", "XIIIXI", "XIIIIX",
                    "IXIIXI", "IXIIIX", "IIIIXX", "XXZZXI", "XXZZIX", "XIZZXX", "IXZZXX",
                    "XXIIXX", "IIIIII"]),
    ("ZZXXZZ", ((0, 1), (4, 5)), ["-YYXIZZ", "-YYIXZZ", "-ZZXIYY", "-ZZIXYY", "ZZXIZZ",
                                  "ZZIXZZ", "IIXXII", "YYXIYY", "YYIXYY"]),
    ("XXXXXX", ((2, 3),), ["XXXXII", "XIXXXI", "XIXXIX", "IXXXXI", "IXXXIX", "IIXXXX",
                           "XXXXXX", "XIYYII", "IXYYII", "IIYYXI", "IIYYIX", "XXYYXI",
                           "XXYYIX", "XIYYXX", "IXYYXX"]),
    ("ZZYZZY", ((0, 1),), ["ZZYZZY", "-YYYZZY"]),
    ("ZZYZYZ", ((0, 1),), ["ZZYZYZ", "-YYYZYZ"]),
    ("ZZZYZY", ((0, 1),), ["ZZZYZY", "YYZYZY"]),
    ("ZZZYYZ", ((0, 1),), ["ZZZYYZ", "YYZYYZ"]),
    ("ZYYZZZ", ((4, 5),), ["ZYYZZZ", "ZYYZYY"]),
    ("ZYZYZZ", ((4, 5),), ["ZYZYZZ", "ZYZYYY"]),
    ("YZYZZZ", ((4, 5),), ["YZYZZZ", "YZYZYY"]),
    ("YZZYZZ", ((4, 5),), ["YZZYZZ", "YZZYYY"]),
    ("YZXXYZ", (), ["YZXIYZ", "YZIXYZ"]),
    ("YZXXZY", (), ["YZXIZY", "YZIXZY"]),
    ("ZYXXYZ", (), ["ZYXIYZ", "ZYIXYZ"]),
    ("ZYXXZY", (), ["ZYXIZY", "ZYIXZY"]),
]

CRAZY6_SIGN_ERRATA = {
    "XIYYII", "IXYYII", "IIYYXI", "IIYYIX", "XXYYXI", "XXYYIX", "XIYYXX", "IXYYXX",
    "YYZYZY", "YYZYYZ", "ZYYZYY", "ZYZYYY", "YZYZYY", "YZZYYY",
    "YZXIYZ", "YZIXYZ", "YZXIZY", "YZIXZY", "ZYXIYZ", "ZYIXYZ", "ZYXIZY", "ZYIXZY",
}

# hypergraph stabilizers as {letters: coefficient}, order of the named states
TOFFOLI_STABILIZERS = {
    "S1": {"XII": 0.5, "XIZ": 0.5, "XZI": 0.5, "XZZ": -0.5},
    "S2": {"IXI": 0.5, "IXZ": 0.5, "ZXI": 0.5, "ZXZ": -0.5},
    "S3": {"IIX": 0.5, "IZX": 0.5, "ZIX": 0.5, "ZZX": -0.5},
    "S4": {"XXI": 0.5, "XXZ": 0.5, "YYI": 0.5, "YYZ": -0.5},
    "S5": {"XIX": 0.5, "XZX": 0.5, "YIY": 0.5, "YZY": -0.5},
    "S6": {"IXX": 0.5, "ZXX": 0.5, "IYY": 0.5, "ZYY": -0.5},
    "S7": {"XXX": 0.5, "XYY": 0.5, "YXY": 0.5, "YYX": 0.5},
}

FC_TOFFOLI_STABILIZERS = {
    "S1": {"XII": -0.5, "XIZ": 0.5, "XZI": 0.5, "XZZ": 0.5},
    "S2": {"IXI": -0.5, "IXZ": 0.5, "ZXI": 0.5, "ZXZ": 0.5},
    "S3": {"IIX": -0.5, "IZX": 0.5, "ZIX": 0.5, "ZZX": 0.5},
    "S4": {"XXI": 0.5, "XXZ": -0.5, "YYI": 0.5, "YYZ": 0.5},
    "S5": {"XIX": 0.5, "XZX": -0.5, "YIY": 0.5, "YZY": 0.5},
    "S6": {"IXX": 0.5, "ZXX": 0.5, "IYY": -0.5, "ZYY": 0.5},
    "S7": {"XXX": -0.5, "XYY": -0.5, "YXY": -0.5, "YYX": -0.5},
}

# S6 as printed is not a stabilizer; the product of generators 2 and 3 is:
FC_TOFFOLI_ERRATA = {"S6": {"IXX": 0.5, "ZXX": -0.5, "IYY": 0.5, "ZYY": 0.5}}

# two Bell pairs on (1,2) and (3,4)
BELL_PAIRS_PLAN = {
    "XZXZ": ["IIXZ", "XZII", "XZXZ"],
    "ZXZX": ["IIZX", "ZXII", "ZXZX"],
    "YYYY": ["YYII", "IIYY", "YYYY"],
    "XZZX": ["XZZX"],
    "ZXXZ": ["ZXXZ"],
    "YYXZ": ["YYXZ"],
    "YYZX": ["YYZX"],
    "XZYY": ["XZYY"],
    "ZXYY": ["ZXYY"],
}

# two-qubit GHZ settings in the star frame (centre first)
STAR2_SETTINGS = ["XZ", "ZX", "YY"]
