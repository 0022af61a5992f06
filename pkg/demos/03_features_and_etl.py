"""
From recorded tests to a training set
=====================================

For each recorded action (except the first of every test) every component
of the current window becomes one row: five features that relate it to the
previously used component, and a label saying whether it was used next.
"""

# %%
import io

from mlec import etl
from mlec.features import focus_cycle, focus_distance
from mlec.pipeline import record_suites
from mlec.suites import DEMO_SUITES, demo_suite
from mlec.sut import Action, load_demo

buf = io.StringIO()
_, stats = record_suites(load_demo(), [demo_suite(n) for n in DEMO_SUITES], sink=buf)
raw = buf.getvalue()
print(raw.splitlines()[0])
print(*raw.splitlines()[1:4], sep="\n")
print(f"rows={stats.rows} true={stats.true_rows} ({100 * stats.true_ratio:.2f}%)")

# %%
# Focus distance counts Tab presses.  With credentials typed, the login
# window's focus cycle is Username, Password, Login, Cancel.
sut = load_demo()
LOGIN = ("LoginDialog[Login]", "JRootPane", "JLayeredPane", "JPanel")
for path, text in ((("JTextField[Username]",), "Max"), (("JPasswordField[Password]",), "ReTest")):
    sut.execute(Action("enter-text", sut.current_state().find(LOGIN + path), text))
state = sut.current_state()
cycle = focus_cycle(state, "login")
user = state.find(LOGIN + ("JTextField[Username]",))
for c in cycle:
    print(f"{str(c):30s} {focus_distance(user, c, cycle):+d}")

# %%
# The ETL step drops the identifier column, encodes booleans and keeps each
# negative row with probability 0.9.
text, report = etl.transform(raw, keep_fraction=0.9, seed=1)
print(report)
x, y = etl.load_dataset(text)
print("X", x.shape, "positives", int(y.sum()))
