from rest_framework import serializers

from apps.features.catalog import FEATURE_COUNT

from .outcomes import FailureClass, OutcomeStatus


class ExitSerializer(serializers.Serializer):
    code = serializers.IntegerField(allow_null=True)
    signal = serializers.IntegerField(allow_null=True, min_value=1)

    def validate(self, attrs):
        if (attrs["code"] is None) == (attrs["signal"] is None):
            raise serializers.ValidationError("exactly one of code and signal is set")
        return attrs


class StdoutSerializer(serializers.Serializer):
    sha256 = serializers.RegexField(r"^[0-9a-f]{64}$")
    size = serializers.IntegerField(min_value=0)
    head = serializers.CharField(allow_blank=True, trim_whitespace=False)


class LevelOutcomeSerializer(serializers.Serializer):
    optLevel = serializers.CharField()
    status = serializers.ChoiceField(choices=OutcomeStatus.choices)
    compileExit = ExitSerializer(allow_null=True)
    runExit = ExitSerializer(allow_null=True)
    stdout = StdoutSerializer(allow_null=True)

    def validate(self, attrs):
        if (attrs["status"] == OutcomeStatus.OK) != (attrs["stdout"] is not None):
            raise serializers.ValidationError({"stdout": "recorded exactly for ok outcomes"})
        return attrs


class LedgerHeaderSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["header"])
    formatVersion = serializers.IntegerField(min_value=1)
    tool = serializers.CharField()
    label = serializers.CharField(allow_blank=True)
    featureOrder = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    spec = serializers.DictField()
    configSource = serializers.DictField()
    startedAt = serializers.DateTimeField()


class TrialLineSerializer(serializers.Serializer):
    """
    One trial of a campaign ledger.

    ``config`` is null for the default-configuration baseline and for
    trials whose generator failed before a configuration was used.
    """

    kind = serializers.ChoiceField(choices=["trial"])
    trialId = serializers.IntegerField(min_value=0)
    centroidIndex = serializers.IntegerField(min_value=0, allow_null=True)
    drawSeed = serializers.IntegerField(min_value=0)
    generatorSeed = serializers.IntegerField(min_value=0)
    config = serializers.ListField(
        child=serializers.BooleanField(), min_length=FEATURE_COUNT, max_length=FEATURE_COUNT, allow_null=True
    )
    flags = serializers.ListField(child=serializers.CharField())
    programPath = serializers.CharField(allow_null=True)
    outcomes = serializers.DictField(child=LevelOutcomeSerializer())
    failureClass = serializers.ChoiceField(choices=FailureClass.choices)
    differential = serializers.BooleanField()
    detail = serializers.CharField(allow_blank=True, trim_whitespace=False)
    timing = serializers.DictField(required=False)


class LedgerFooterSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["footer"])
    trials = serializers.IntegerField(min_value=0)
    counts = serializers.DictField(child=serializers.IntegerField(min_value=0))
    stopReason = serializers.ChoiceField(choices=["budget", "max-trials", "interrupted"])
    endedAt = serializers.DateTimeField()
