"""Regenerate src/mlec/data/demo_model.json.

The demo mirrors a small Swing application: a login dialog (credentials
Max / ReTest) that opens a main window with an address-book tab and a
calculator tab.  Run from the repository root.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "mlec" / "data" / "demo_model.json"


def comp(path, category, x, y, w, h, **extra):
    c = {"path": list(path), "category": category, "bounds": {"x": x, "y": y, "w": w, "h": h}}
    c.update(extra)
    return c


def var(name):
    return {"var": name}


def const(value):
    return {"const": value}


def length(name):
    return {"len": name}


def guard(left, op, right):
    return {"left": left, "op": op, "right": right}


def login_window():
    root = ("LoginDialog[Login]",)
    rp = root + ("JRootPane",)
    lp = rp + ("JLayeredPane",)
    cp = lp + ("JPanel",)
    bp = cp + ("JPanel[buttons]",)
    return {
        "id": "login",
        "components": [
            comp(root, "container", 0, 0, 300, 180, display="LoginDialog [Login]"),
            comp(rp, "container", 0, 0, 300, 180),
            comp(lp, "container", 0, 0, 300, 180),
            comp(cp, "container", 0, 0, 300, 180),
            comp(cp + ("JLabel[Username: ]",), "label", 10, 20, 80, 24, display="JLabel [Username: ]"),
            comp(cp + ("JTextField[Username]",), "text-input", 100, 20, 180, 24,
                 display="JTextField Username", focusable=True, focus_index=0, lexicon="credentials",
                 on={"enter-text": {"bind": "username", "call": "username_changed"}}),
            comp(cp + ("JLabel[Password: ]",), "label", 10, 54, 80, 24, display="JLabel [Password: ]"),
            comp(cp + ("JPasswordField[Password]",), "text-input", 100, 54, 180, 24,
                 id="pw_field", enabled=False, display="JPasswordField Password", focusable=True, focus_index=1, lexicon="credentials",
                 on={"enter-text": {"bind": "password", "call": "password_changed"}}),
            comp(cp + ("JLabel[Message]",), "label", 10, 80, 270, 16, id="login_message", visible=False,
                 display="JLabel [Invalid credentials]"),
            comp(bp, "container", 10, 100, 280, 40),
            comp(bp + ("JButton[Login]",), "button-like", 100, 100, 80, 28, id="btn_login", enabled=False,
                 display="JButton [Login]", focusable=True, focus_index=2, on={"click": {"call": "login"}}),
            comp(bp + ("JButton[Cancel]",), "button-like", 190, 100, 80, 28,
                 display="JButton [Cancel]", focusable=True, focus_index=3, on={"click": {"call": "cancel"}}),
        ],
    }


ROWS = [
    ["Mustermann", "Max", "42", "Musterweg", "1", "76137", "Karlsruhe"],
    ["Schmidt", "Anna", "35", "Hauptstrasse", "5", "10115", "Berlin"],
    ["Schneider", "Paul", "28", "Bahnhofstrasse", "12", "80331", "Muenchen"],
    ["Fischer", "Lena", "51", "Gartenweg", "7", "50667", "Koeln"],
    ["", "", "", "", "", "", ""],
    ["", "", "", "", "", "", ""],
]
FIELDS = [
    ("First name", "first_name", "names"),
    ("Last name", "last_name", "names"),
    ("Age", "age", "numbers"),
    ("Street", "street", "text"),
    ("Number", "number", "numbers"),
    ("Postal code", "postal_code", "numbers"),
    ("City", "city", "text"),
]


def main_window():
    root = ("MainFrame[ReTest Demo]",)
    rp = root + ("JRootPane",)
    lp = rp + ("JLayeredPane",)
    cp = lp + ("JPanel",)
    tabs = cp + ("JTabbedPane",)
    ab = tabs + ("JPanel[AddressBook]",)
    calc = tabs + ("JPanel[Calculator]",)
    table = ab + ("JScrollPane", "JTable[Address book]")
    comps = [
        comp(root, "container", 0, 0, 800, 600, display="MainFrame [ReTest Demo]"),
        comp(rp, "container", 0, 0, 800, 600),
        comp(lp, "container", 0, 0, 800, 600),
        comp(cp, "container", 0, 0, 800, 600),
        comp(tabs, "container", 10, 10, 780, 540),
        comp(tabs + ("Tab[Address book]",), "tab", 12, 12, 100, 22, display="Tab [Address book]",
             focusable=True, focus_index=0, on={"click": {"call": "show_address_book"}}),
        comp(tabs + ("Tab[Calculator]",), "tab", 114, 12, 100, 22, display="Tab [Calculator]",
             focusable=True, focus_index=1, on={"click": {"call": "show_calculator"}}),
        comp(ab, "container", 10, 36, 780, 510, id="ab_panel"),
        comp(ab + ("JLabel[Manage address book]",), "label", 20, 44, 200, 20,
             display="JLabel [Manage address book]"),
        comp(ab + ("JScrollPane",), "container", 20, 70, 640, 140),
        comp(table, "container", 20, 70, 640, 140),
    ]
    for r, row in enumerate(ROWS, 1):
        row_path = table + (f"TableRow[{r}]",)
        extra = {"id": f"row{r}", "visible": False} if r > 4 else {}
        comps.append(comp(row_path, "container", 20, 70 + 20 * r, 640, 20, **extra))
        for c, text in enumerate(row, 1):
            comps.append(comp(
                row_path + (f"TableCell[{c}/{r}]",), "table-cell", 20 + 90 * (c - 1), 70 + 20 * r, 90, 20,
                display=f"TableCell [{text}] ({c}/{r}) of JTable[Address book]",
                on={"click": {"assign": {"selected_row": r}, "call": "select_row"}},
            ))
    form = ab + ("JPanel[Form]",)
    comps.append(comp(form, "container", 20, 230, 640, 260))
    for i, (label, variable, section) in enumerate(FIELDS):
        y = 236 + 30 * i
        comps.append(comp(form + (f"JLabel[{label}]",), "label", 24, y, 100, 24, display=f"JLabel [{label}]"))
        comps.append(comp(form + (f"JTextField[{label}]",), "text-input", 130, y, 200, 24,
                          display=f"JTextField {label}", focusable=True, focus_index=2 + i, lexicon=section,
                          on={"enter-text": {"bind": variable}}))
    buttons = ab + ("JPanel[buttons]",)
    comps.append(comp(buttons, "container", 360, 236, 200, 120))
    comps.append(comp(buttons + ("JButton[Add address]",), "button-like", 360, 236, 140, 28,
                      display="JButton [Add address]", focusable=True, focus_index=9,
                      on={"click": {"call": "add_contact"}}))
    comps.append(comp(buttons + ("JButton[Delete address]",), "button-like", 360, 270, 140, 28,
                      id="btn_delete", enabled=False, display="JButton [Delete address]", focusable=True,
                      focus_index=10, on={"click": {"call": "delete_contact"}}))
    comps.append(comp(buttons + ("JButton[Edit entry]",), "button-like", 360, 304, 140, 28,
                      id="btn_edit", enabled=False, display="JButton [Edit entry]", focusable=True,
                      focus_index=11, on={"click": {"call": "edit_contact"}}))

    comps.append(comp(calc, "container", 10, 36, 780, 510, id="calc_panel", visible=False))
    comps.append(comp(calc + ("JLabel[Calculator]",), "label", 20, 44, 200, 20, display="JLabel [Calculator]"))
    sections = [
        ("JPanel[Arithmetic]", 80, [
            ("JTextField[Operand A]", "text-input", "JTextField Operand A", "numbers", {"enter-text": {"bind": "op_a"}}, None),
            ("JComboBox[Operator]", "other", "JComboBox Operator", None, {"select": {"bind": "operator"}}, ["+", "-", "*", "/"]),
            ("JTextField[Operand B]", "text-input", "JTextField Operand B", "numbers", {"enter-text": {"bind": "op_b"}}, None),
            ("JButton[Calculate]", "button-like", "JButton [Calculate]", None, {"click": {"call": "calculate"}}, None),
        ]),
        ("JPanel[Base]", 160, [
            ("JTextField[Number]", "text-input", "JTextField Number", "numbers", {"enter-text": {"bind": "base_number"}}, None),
            ("JTextField[From base]", "text-input", "JTextField From base", "numbers", {"enter-text": {"bind": "from_base"}}, None),
            ("JTextField[To base]", "text-input", "JTextField To base", "numbers", {"enter-text": {"bind": "to_base"}}, None),
            ("JButton[Convert number]", "button-like", "JButton [Convert number]", None, {"click": {"call": "convert_base"}}, None),
        ]),
        ("JPanel[Length]", 240, [
            ("JTextField[Length]", "text-input", "JTextField Length", "numbers", {"enter-text": {"bind": "length"}}, None),
            ("JComboBox[Length unit]", "other", "JComboBox Length unit", None, {"select": {"bind": "length_unit"}}, ["mm", "cm", "m", "km"]),
            ("JButton[Convert length]", "button-like", "JButton [Convert length]", None, {"click": {"call": "convert_length"}}, None),
        ]),
        ("JPanel[Weight]", 320, [
            ("JTextField[Weight]", "text-input", "JTextField Weight", "numbers", {"enter-text": {"bind": "weight"}}, None),
            ("JComboBox[Weight unit]", "other", "JComboBox Weight unit", None, {"select": {"bind": "weight_unit"}}, ["g", "kg", "t"]),
            ("JButton[Convert weight]", "button-like", "JButton [Convert weight]", None, {"click": {"call": "convert_weight"}}, None),
        ]),
    ]
    focus = 12
    for panel, y, members in sections:
        comps.append(comp(calc + (panel,), "container", 20, y, 700, 60))
        for i, (name, category, display, section, handlers, choices) in enumerate(members):
            extra = {"display": display, "focusable": True, "focus_index": focus, "on": handlers}
            if section:
                extra["lexicon"] = section
            if choices:
                extra["choices"] = choices
            comps.append(comp(calc + (panel, name), category, 30 + 150 * i, y + 10, 140, 24, **extra))
            focus += 1
        if panel == "JPanel[Arithmetic]":
            comps.append(comp(calc + (panel, "JLabel[Result]"), "label", 630, y + 10, 80, 24,
                              display="JLabel [Result]"))
    comps.append(comp(cp + ("JButton[Close]",), "button-like", 690, 560, 90, 28, display="JButton [Close]",
                      focusable=True, focus_index=focus, on={"click": {"call": "close"}}))
    return {"id": "main", "components": comps}


def procedures():
    login_failed = [{"add": "attempts", "value": 1}, {"show": "login_message"}]
    return {
        "login": [
            {"if": guard(var("username"), "==", const("Max")),
             "then": [{"if": guard(var("password"), "==", const("ReTest")),
                       "then": [{"close": "login"}, {"open": "main"}, {"set": "attempts", "value": const(0)}],
                       "else": login_failed}],
             "else": login_failed},
            {"if": guard(var("attempts"), ">=", const(3)), "then": [{"disable": "btn_login"}]},
        ],
        "cancel": [{"exit": True}],
        "close": [{"exit": True}],
        # the password field unlocks once a username is typed, the login
        # button once a password is typed (until the dialog locks up)
        "username_changed": [
            {"if": guard(length("username"), ">", const(0)),
             "then": [{"enable": "pw_field"}],
             "else": [{"disable": "pw_field"}, {"disable": "btn_login"}]},
        ],
        "password_changed": [
            {"if": guard(length("password"), "<", const(4)),
             "then": [{"set": "weak_password", "value": const(1)}],
             "else": [{"set": "weak_password", "value": const(0)}]},
            {"if": guard(var("attempts"), "<", const(3)),
             "then": [{"enable": "btn_login"}], "else": [{"disable": "btn_login"}]},
        ],
        "show_address_book": [{"show": "ab_panel"}, {"hide": "calc_panel"}],
        "show_calculator": [{"hide": "ab_panel"}, {"show": "calc_panel"}],
        "select_row": [
            {"if": guard(var("selected_row"), "<=", var("rows")),
             "then": [{"enable": "btn_delete"}, {"enable": "btn_edit"}],
             "else": [{"set": "selected_row", "value": const(0)}]},
        ],
        "add_contact": [
            {"if": guard(length("first_name"), ">", const(0)), "then": [
                {"if": guard(length("last_name"), ">", const(0)), "then": [
                    {"if": guard(var("age"), ">", const(0)), "then": [
                        {"if": guard(var("age"), "<", const(150)), "then": [
                            {"if": guard(var("postal_code"), ">=", const(10000)), "then": [
                                {"if": guard(var("postal_code"), "<=", const(99999)), "then": [
                                    {"if": guard(var("rows"), "<", const(6)), "then": [
                                        {"add": "rows", "value": 1},
                                        {"if": guard(var("rows"), "==", const(5)),
                                         "then": [{"show": "row5"}], "else": [{"show": "row6"}]},
                                    ]},
                                ]},
                            ]},
                        ]},
                    ]},
                ]},
            ]},
        ],
        "delete_contact": [
            {"if": guard(var("selected_row"), ">", const(0)), "then": [
                {"if": guard(var("rows"), ">", const(4)),
                 "then": [{"add": "rows", "value": -1}],
                 "else": [{"set": "deleted", "value": const(1)}]},
                {"set": "selected_row", "value": const(0)},
                {"disable": "btn_delete"},
                {"disable": "btn_edit"},
            ]},
        ],
        "edit_contact": [
            {"if": guard(var("selected_row"), ">", const(0)), "then": [
                {"if": guard(length("street"), ">", const(0)), "then": [
                    {"if": guard(var("number"), ">", const(0)),
                     "then": [{"set": "edited", "value": const(1)}]},
                ]},
            ]},
        ],
        "calculate": [
            {"if": guard(var("operator"), "==", const("+")), "then": [{"set": "result", "value": const(1)}],
             "else": [
                 {"if": guard(var("operator"), "==", const("-")), "then": [{"set": "result", "value": const(2)}],
                  "else": [
                      {"if": guard(var("operator"), "==", const("*")), "then": [{"set": "result", "value": const(3)}],
                       "else": [
                           {"if": guard(var("op_b"), "==", const(0)),
                            "then": [{"set": "result", "value": const(-1)}],
                            "else": [{"set": "result", "value": const(4)}]},
                       ]},
                  ]},
             ]},
            {"if": guard(var("op_a"), ">", const(999)), "then": [{"set": "result", "value": const(0)}]},
        ],
        "convert_base": [
            {"if": guard(var("from_base"), ">=", const(2)), "then": [
                {"if": guard(var("from_base"), "<=", const(16)), "then": [
                    {"if": guard(var("to_base"), ">=", const(2)), "then": [
                        {"if": guard(var("to_base"), "<=", const(16)), "then": [
                            {"if": guard(length("base_number"), ">", const(0)),
                             "then": [{"set": "result", "value": const(5)}]},
                        ]},
                    ]},
                ]},
            ]},
        ],
        "convert_length": [
            {"if": guard(var("length"), ">", const(0)), "then": [
                {"if": guard(var("length_unit"), "==", const("m")),
                 "then": [{"set": "result", "value": const(6)}],
                 "else": [{"if": guard(var("length_unit"), "==", const("km")),
                           "then": [{"set": "result", "value": const(7)}]}]},
            ]},
        ],
        "convert_weight": [
            {"if": guard(var("weight"), ">", const(0)), "then": [
                {"if": guard(var("weight_unit"), "==", const("kg")),
                 "then": [{"set": "result", "value": const(8)}]},
            ]},
        ],
    }


def build():
    return {
        "name": "demo",
        "initial_window": "login",
        "variables": {
            "username": "", "password": "", "attempts": 0, "weak_password": 0,
            "selected_row": 0, "rows": 4, "deleted": 0, "edited": 0,
            "first_name": "", "last_name": "", "age": 0, "street": "", "number": 0,
            "postal_code": 0, "city": "",
            "op_a": 0, "op_b": 0, "operator": "+", "result": 0,
            "base_number": "", "from_base": 0, "to_base": 0,
            "length": 0, "length_unit": "mm", "weight": 0, "weight_unit": "g",
        },
        "lexicon": {
            "credentials": ["Max", "ReTest", "admin", "guest"],
            "names": ["John", "Doe", "Erika", "Mustermann", "Max"],
            "numbers": ["0", "1", "2", "10", "13", "16", "21", "42", "1000", "1011", "12345", "76137"],
            "text": ["Musterstrasse", "Anderer Weg", "Musterstadt", "Hauptstrasse", "abc"],
        },
        "windows": [login_window(), main_window()],
        "procedures": procedures(),
    }


LOGIN = ("LoginDialog[Login]", "JRootPane", "JLayeredPane", "JPanel")
MAIN = ("MainFrame[ReTest Demo]", "JRootPane", "JLayeredPane", "JPanel")
TABS = MAIN + ("JTabbedPane",)
FORM = TABS + ("JPanel[AddressBook]", "JPanel[Form]")
AB_BUTTONS = TABS + ("JPanel[AddressBook]", "JPanel[buttons]")
TABLE = TABS + ("JPanel[AddressBook]", "JScrollPane", "JTable[Address book]")
CALC = TABS + ("JPanel[Calculator]",)


def click(path):
    return {"kind": "click", "target": list(path), "payload": None}


def enter(path, text):
    return {"kind": "enter-text", "target": list(path), "payload": text}


def select(path, choice):
    return {"kind": "select", "target": list(path), "payload": choice}


def cell(c, r):
    return TABLE + (f"TableRow[{r}]", f"TableCell[{c}/{r}]")


LOGIN_STEPS = [
    enter(LOGIN + ("JTextField[Username]",), "Max"),
    enter(LOGIN + ("JPasswordField[Password]",), "ReTest"),
    click(LOGIN + ("JPanel[buttons]", "JButton[Login]")),
]


def suites():
    tab_ab = click(TABS + ("Tab[Address book]",))
    tab_calc = click(TABS + ("Tab[Calculator]",))
    field = lambda name: FORM + (f"JTextField[{name}]",)
    address_book = [
        ("address-book/add-contact", LOGIN_STEPS + [
            tab_ab,
            enter(field("First name"), "John"),
            enter(field("Last name"), "Doe"),
            enter(field("Age"), "42"),
            enter(field("Street"), "Musterstrasse"),
            enter(field("Number"), "13"),
            enter(field("Postal code"), "12345"),
            enter(field("City"), "Musterstadt"),
            click(AB_BUTTONS + ("JButton[Add address]",)),
        ]),
        ("address-book/delete-contact", LOGIN_STEPS + [
            tab_ab, click(cell(1, 1)), click(AB_BUTTONS + ("JButton[Delete address]",)),
        ]),
        ("address-book/update-contact", LOGIN_STEPS + [
            tab_ab,
            click(cell(1, 2)),
            enter(field("Street"), "Anderer Weg"),
            enter(field("Number"), "21"),
            click(AB_BUTTONS + ("JButton[Edit entry]",)),
        ]),
    ]
    arith = CALC + ("JPanel[Arithmetic]",)
    base = CALC + ("JPanel[Base]",)
    length_panel = CALC + ("JPanel[Length]",)
    weight = CALC + ("JPanel[Weight]",)
    calculator = [
        ("calculator/multiply", LOGIN_STEPS + [
            tab_calc,
            enter(arith + ("JTextField[Operand A]",), "1"),
            select(arith + ("JComboBox[Operator]",), "*"),
            enter(arith + ("JTextField[Operand B]",), "2"),
            click(arith + ("JButton[Calculate]",)),
        ]),
        ("calculator/convert-base", LOGIN_STEPS + [
            tab_calc,
            enter(base + ("JTextField[Number]",), "1011"),
            enter(base + ("JTextField[From base]",), "2"),
            enter(base + ("JTextField[To base]",), "10"),
            click(base + ("JButton[Convert number]",)),
        ]),
        ("calculator/convert-length", LOGIN_STEPS + [
            tab_calc,
            enter(length_panel + ("JTextField[Length]",), "1000"),
            select(length_panel + ("JComboBox[Length unit]",), "m"),
            click(length_panel + ("JButton[Convert length]",)),
        ]),
        ("calculator/convert-weight", LOGIN_STEPS + [
            tab_calc,
            enter(weight + ("JTextField[Weight]",), "1000"),
            select(weight + ("JComboBox[Weight unit]",), "kg"),
            click(weight + ("JButton[Convert weight]",)),
        ]),
    ]
    login = [("login/valid-credentials", LOGIN_STEPS)]
    out = {}
    for name, tests in (("address-book", address_book), ("calculator", calculator), ("login", login)):
        out[name] = {
            "schema": "mlec-suite/1",
            "name": name,
            "tests": [{"name": t, "actions": actions} for t, actions in tests],
        }
    return out


if __name__ == "__main__":
    OUT.write_text(json.dumps(build(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")
    for name, doc in suites().items():
        target = OUT.parent / "suites" / f"{name}.json"
        target.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        print(f"wrote {target}")
