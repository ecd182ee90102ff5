"""Generate the synthetic demo panel and CO2 scenario files.

The numbers are invented: a small nonlinear climate-flavoured system with
monthly seasonality, used only to exercise the pipeline end to end.
"""
import numpy as np
import pandas as pd

rng = np.random.default_rng(20240501)
dates = pd.period_range("1980-01", "2018-12", freq="M")
T = len(dates)
month = dates.month.to_numpy()
phase = 2 * np.pi * (month - 1) / 12

co2 = np.empty(T); at = np.empty(T); sst = np.empty(T); tcc = np.empty(T)
pr = np.empty(T); sie = np.empty(T); sit = np.empty(T); alb = np.empty(T)
co2[0], at[0], sst[0], tcc[0], pr[0], sie[0], sit[0], alb[0] = 338.5, -15.0, 1.0, 0.70, 0.85, 12.0, 2.6, 0.45
for t in range(1, T):
    e = rng.standard_normal(8)
    co2[t] = co2[t - 1] + 0.13 + 0.00012 * t + 0.08 * e[0]
    tcc[t] = 0.70 + 0.6 * (tcc[t - 1] - 0.70) + 0.0004 * (co2[t - 1] - 338) + 0.02 * e[1]
    pr[t] = 0.85 + 0.5 * (pr[t - 1] - 0.85) + 0.3 * (tcc[t] - 0.70) + 0.03 * e[2]
    at_star = -15.0 + 0.05 * (co2[t - 1] - 338) - 4.0 * (alb[t - 1] - 0.45)
    at[t] = at[t - 1] + 0.35 * (at_star - at[t - 1]) + 2.0 * (tcc[t] - 0.70) + 0.6 * e[3]
    sst[t] = sst[t - 1] + 0.2 * (1.0 + 0.08 * (at[t] + 15) - sst[t - 1]) + 0.05 * e[4]
    sie_star = 12.0 - 0.6 * (at[t - 1] + 15) - 2.0 * (sst[t - 1] - 1.0) + 0.8 * (sit[t - 1] - 2.6)
    sie[t] = sie[t - 1] + 0.3 * (sie_star - sie[t - 1]) + 0.12 * e[5]
    sit[t] = sit[t - 1] + 0.1 * (2.6 + 0.25 * (sie[t] - 12.0) - 0.03 * (at[t] + 15) - sit[t - 1]) + 0.04 * e[6]
    alb[t] = 0.45 + 0.7 * (alb[t - 1] - 0.45) + 0.01 * (sie[t] - 12.0) + 0.004 * e[7]

panel = pd.DataFrame({
    "date": dates.strftime("%Y-%m"),
    "CO2": co2 + 3.0 * np.cos(phase - 2 * np.pi * 4 / 12),
    "TCC": tcc + 0.05 * np.cos(phase),
    "PR": pr + 0.15 * np.cos(phase - np.pi),
    "AT": at + 14.0 * np.cos(phase - np.pi),
    "SST": sst + 0.8 * np.cos(phase - 2 * np.pi * 7 / 12),
    "SIE": sie + 3.5 * np.cos(phase - 2 * np.pi * 2 / 12),
    "SIT": sit + 0.4 * np.cos(phase - 2 * np.pi * 3 / 12),
    "Albedo": alb + 0.15 * np.cos(phase - 2 * np.pi * 1 / 12),
})
panel.to_csv("demo_panel.csv", index=False, float_format="%.6f")

years = np.arange(2019, 2101)
high = 410.0 + 2.6 * (years - 2019) + 0.028 * (years - 2019) ** 2
low = 410.0 + 40.0 * (1 - np.exp(-(years - 2019) / 25.0))
pd.DataFrame({"date": years, "value": np.round(high, 3)}).to_csv("co2_high.csv", index=False)
pd.DataFrame({"date": years, "value": np.round(low, 3)}).to_csv("co2_low.csv", index=False)
