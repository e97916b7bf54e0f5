"""
Formulaires de l'app runs.
"""

from typing import Any

from django import forms
from django.core.validators import MaxValueValidator, MinValueValidator
from django.utils.translation import gettext_lazy as _

from config.defaults import EngineDefaults
from config.models import EngineConfig
from netsim.network import SchedulingMode
from ring.arithmetic import RingConfig
from sharing.engine import Engine


class RunConfigForm(forms.Form):
    """Options communes aux commandes ``run``, ``bench`` et ``demo``.

    Le formulaire valide les drapeaux de la ligne de commande ; les valeurs
    absentes sont complétées par ``EngineDefaults`` (voir ``from_options``).
    """

    n = forms.IntegerField(
        label=_("Bits de l'anneau"),
        validators=[MinValueValidator(2), MaxValueValidator(128)],
    )
    d = forms.IntegerField(label=_("Bits fractionnaires"), min_value=1)
    seed = forms.IntegerField(label=_("Graine"), min_value=0)
    latency = forms.ChoiceField(
        label=_("Modèle de latence"), choices=EngineConfig.Latency.choices
    )
    optimize = forms.BooleanField(label=_("Optimiser"), required=False)
    ppa = forms.BooleanField(label=_("Extraction logarithmique"), required=False)
    half_sharing = forms.BooleanField(label=_("Demi-partage"), required=False)
    actor = forms.BooleanField(label=_("Mode acteurs"), required=False)
    wall_clock = forms.BooleanField(label=_("Temps réel"), required=False)
    debug_checks = forms.BooleanField(label=_("Vérifications"), required=False)

    @classmethod
    def from_options(
        cls, options: dict[str, Any], defaults: EngineDefaults
    ) -> "RunConfigForm":
        """Construit le formulaire depuis les options d'une commande."""

        def pick(name: str, fallback: Any) -> Any:
            value = options.get(name)
            return fallback if value is None else value

        data = {
            "n": pick("n", defaults.ring_bits),
            "d": pick("d", defaults.fraction_bits),
            "seed": pick("seed", defaults.seed),
            "latency": pick("latency", defaults.latency),
            "optimize": defaults.optimize and not options.get("no_optimize", False),
            "ppa": bool(options.get("ppa")) or defaults.ppa,
            "half_sharing": bool(options.get("half_sharing")) or defaults.half_sharing,
            "actor": bool(options.get("actor")),
            "wall_clock": bool(options.get("wall_clock")),
            "debug_checks": defaults.debug_checks,
        }
        return cls(data=data)

    def clean(self) -> dict[str, Any]:
        cleaned: dict[str, Any] = super().clean() or {}
        n, d = cleaned.get("n"), cleaned.get("d")
        if n is not None and d is not None and d >= n:
            self.add_error("d", _("d doit être strictement inférieur à n"))
        return cleaned

    def error_text(self) -> str:
        return "; ".join(
            f"--{name.replace('_', '-')} : {' '.join(messages)}"
            for name, messages in self.errors.items()
        )

    def build_engine(self) -> Engine:
        data = self.cleaned_data
        return Engine(
            RingConfig(data["n"], data["d"]),
            seed=data["seed"],
            latency=data["latency"],
            mode=SchedulingMode.ACTOR if data["actor"] else SchedulingMode.LOCKSTEP,
            ppa=data["ppa"],
            half_sharing=data["half_sharing"],
            debug_checks=data["debug_checks"],
        )

    def summary(self) -> dict[str, Any]:
        """Configuration enregistrée avec l'exécution."""
        return dict(self.cleaned_data)
